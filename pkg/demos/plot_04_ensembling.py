"""
Ensembling independently trained models
=======================================

Each model's probability tables are averaged before decoding. The average
is computed in a fixed order, so shuffling the model list does not change
a single bit of the output.
"""

from treeparse.conllu import Treebank
from treeparse.ensemble import ensemble_predict
from treeparse.evaluation import evaluate
from treeparse.model import TrainSchedule, predict, train
from treeparse.toy import desk_config, toy_treebank

train_set = toy_treebank(40, seed=0)
held_out = toy_treebank(30, seed=77)

# %%
# A shortened schedule leaves the models imperfect, which gives the
# ensemble something to fix.
schedule = TrainSchedule(frozen_epochs=2, frozen_lr=1e-3, main_epochs=6, batches_per_epoch=10,
                         batch_size=16, peak_lr=3e-3, warmup_epochs=1)
models = [train(desk_config(seed=s), schedule, [train_set]) for s in (1, 2, 3)]

for seed, model in zip((1, 2, 3), models):
    out = Treebank(held_out.name, tuple(predict(model, s) for s in held_out.sentences))
    print(f"seed {seed}: LAS {evaluate(held_out, out).las:.2f}")

combined = Treebank(held_out.name, tuple(ensemble_predict(models, s) for s in held_out.sentences))
print(f"ensemble: LAS {evaluate(held_out, combined).las:.2f}")

# %%
# Reversing the model list gives exactly the same trees.
reordered = tuple(ensemble_predict(models[::-1], s) for s in held_out.sentences)
assert reordered == combined.sentences
print("order-independent")

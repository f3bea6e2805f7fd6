"""
Training a parser on a toy corpus
=================================

The synthetic corpus follows a tiny case-marked grammar, so a small network
can memorise it in well under a minute on one CPU core.
"""

import time

from treeparse.evaluation import evaluate
from treeparse.model import predict, save_model, train
from treeparse.conllu import Treebank, serialize_conllu
from treeparse.toy import desk_config, desk_schedule, toy_treebank

corpus = toy_treebank(50, seed=0)
print(f"{corpus.sentence_count} sentences, {corpus.token_count} tokens")
print(serialize_conllu([corpus.sentences[0]]))

# %%
# Training runs two stages. The embedding tables stay frozen for the first
# one. The second stage uses linear warmup and cosine decay to zero.
losses = []
start = time.perf_counter()
model = train(desk_config(seed=1), desk_schedule(), [corpus],
              callback=lambda stage, epoch, m, loss: losses.append((stage, epoch, loss)))
print(f"trained in {time.perf_counter() - start:.1f}s")
for stage, epoch, loss in losses[::5]:
    print(f"{stage:6s} epoch {epoch:2d} loss {loss:.4f}")

# %%
# Prediction decodes a tree from the head probabilities. Labels come from the
# most probable head of each token.
predicted = Treebank(corpus.name, tuple(predict(model, s) for s in corpus.sentences))
scores = evaluate(corpus, predicted)
print(f"UAS {scores.uas:.2f}  LAS {scores.las:.2f}  UPOS {scores.upos:.2f}  UFeats {scores.ufeats:.2f}")

save_model(model, "toy_model.bin")
print("saved toy_model.bin")

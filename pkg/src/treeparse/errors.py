"""Exception hierarchy shared across the package."""


class TreeparseError(Exception):
    """Base class for all errors raised by treeparse."""


class DataError(TreeparseError):
    """Input data (treebanks, model files, rule tables) is unusable."""


class ConfigError(TreeparseError):
    """A configuration file or option is invalid."""

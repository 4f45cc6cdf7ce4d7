"""atomgrid: greenfield multi-carrier capacity-expansion LP with nuclear
cogeneration, plus the reactor cost-normalization pipeline feeding it."""

from importlib import resources


def data_path(name: str):
    """Path to a bundled data file (cost records, escalation table, desk system)."""
    return resources.files("atomgrid").joinpath("data", name)


__version__ = "0.1.0"

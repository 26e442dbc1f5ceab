"""Run configuration: a typed bundle with INI round-tripping.

The file format has three sections -- [instance], [optimizer], [verify] --
all optional, all keys optional.  Parsing then re-serializing a config (or
the other way around) is the identity: unset optional fields stay unset and
are omitted from the serialized text.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields

__all__ = ["RunConfig"]

_INSTANCE_MODES = ("deterministic", "randomized-individual",
                   "randomized-third-moment", "synthetic")
_OPTIMIZERS = ("svrc", "gd", "cubic")


@dataclass
class RunConfig:
    # [instance]
    mode: str = "deterministic"
    p: int = 1
    n: int = 4
    delta: float = 960.0
    L: float = 1.0
    eps: float = 1.0
    d: int | None = None
    ell_hat: float | None = None
    haar_c: bool = False
    curvature: float = 1.0    # synthetic mode only
    ripple: float = 1.0       # synthetic mode only

    # [optimizer]
    optimizer: str = "svrc"
    step: float = 0.01        # gd step size
    M: float | None = None
    b_g: int | None = None
    b_h: int | None = None
    S: int | None = None
    T: int | None = None
    full_batch: bool = False
    L2: float | None = None
    delta_hat: float | None = None  # gap estimate for the svrc schedule

    # run-level
    seed: int = 0
    out: str | None = None
    budget: int | None = None

    # [verify]
    num_points: int = 60
    zero_chain_samples: int = 500
    pairs: int = 120
    trials: int = 2000
    starts: int = 20

    def __post_init__(self):
        if self.mode not in _INSTANCE_MODES:
            raise ValueError(f"unknown instance mode {self.mode!r}; "
                             f"expected one of {_INSTANCE_MODES}")
        if self.optimizer not in _OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}; "
                             f"expected one of {_OPTIMIZERS}")

    # -- section layouts ---------------------------------------------------

    _SECTIONS = {
        "instance": ("mode", "p", "n", "delta", "L", "eps", "d", "ell_hat",
                     "haar_c", "curvature", "ripple"),
        "optimizer": ("optimizer", "step", "M", "b_g", "b_h", "S", "T",
                      "full_batch", "L2", "delta_hat", "seed", "out",
                      "budget"),
        "verify": ("num_points", "zero_chain_samples", "pairs", "trials",
                   "starts"),
    }

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keys are case-sensitive (e.g. L vs l)
        for section, keys in self._SECTIONS.items():
            parser[section] = {}
            for key in keys:
                value = getattr(self, key)
                if value is None:
                    continue
                if isinstance(value, bool):
                    parser[section][key] = "true" if value else "false"
                elif isinstance(value, float):
                    parser[section][key] = repr(value)
                else:
                    parser[section][key] = str(value)
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser()
        parser.optionxform = str
        parser.read_string(text)
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for section, keys in cls._SECTIONS.items():
            if not parser.has_section(section):
                continue
            for key in parser[section]:
                if key not in keys:
                    raise ValueError(
                        f"unknown key {key!r} in section [{section}]")
            for key in keys:
                if not parser.has_option(section, key):
                    continue
                ann = types[key]
                if ann in ("bool", bool):
                    kwargs[key] = parser.getboolean(section, key)
                elif ann in ("int", int) or ann == "int | None":
                    kwargs[key] = parser.getint(section, key)
                elif ann in ("float", float) or ann == "float | None":
                    kwargs[key] = parser.getfloat(section, key)
                else:
                    kwargs[key] = parser.get(section, key)
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_ini(fh.read())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_ini())

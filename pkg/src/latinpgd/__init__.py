"""latinpgd: non-incremental LATIN-PGD solver for low-frequency dynamics of
quasi-brittle damaging structures, plus an incremental Newmark/quasi-Newton
reference solver."""

__version__ = "0.1.0"

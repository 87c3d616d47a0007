"""Model-comparison games for Horn description logics and the Horn guarded
fragment: simulation solvers, Ehrenfeucht-Fraisse style deciders, separating
concept synthesis, translations to guarded tgds, and an ATM-based hardness
instance generator."""

__version__ = "0.1.0"

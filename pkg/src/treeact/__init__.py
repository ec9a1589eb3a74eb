"""treeact: exact arithmetic and spectra for groups acting on rooted trees.

Subpackages follow the pipeline: tree shapes and vertices (`tree`),
wreath-recursion automorphisms (`autom`), group actions with stabilizer
and search machinery (`actions`), exact group-algebra arithmetic
(`groupalg`), evaluation of the tree representation and its tensor powers
(`reps`), Markov operators and Schreier spectra (`spectra`), built-in
actions (`catalog`), machine files and the command line (`machinefile`,
`cli`).
"""

from .actions import ActionSpec, LevelTower, SchreierGraph
from .autom import Element, Machine, StateDef
from .outcomes import BudgetExceeded, Certified, Inconclusive
from .tree import TreeShape

__all__ = [
    "ActionSpec",
    "BudgetExceeded",
    "Certified",
    "Element",
    "Inconclusive",
    "LevelTower",
    "Machine",
    "SchreierGraph",
    "StateDef",
    "TreeShape",
]

__version__ = "0.1.0"

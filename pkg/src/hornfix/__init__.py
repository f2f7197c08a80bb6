"""DATALOG^r, existential SO-HORN^r and normal-form LFP over finite structures,
with translations between them and a perfect-binary-tree encoding toolkit."""

from .ast import (
    Clause, Const, HornSentence, Kind, LfpFormula, Literal, Program, Rule, SimLfpSystem, Var,
    Vocabulary, normalize,
)
from .diagnostics import Code, Diagnostic, DiagnosticError, SourceSpan
from .engine import (
    BudgetExceeded, EvalResult, FixpointTrace, eval_datalog, eval_horn, eval_lfp, eval_simlfp,
)
from .kprime import ExtensionParams, closure_test, is_member, membership
from .parser import (
    format_horn, format_lfp, format_program, format_simlfp, format_structure, parse_horn,
    parse_lfp, parse_program, parse_structure,
)
from .pistar import compile_program, verify_compilation
from .structure import Relation, Structure, make_structure
from .translate import datalog_to_horn, datalog_to_simlfp, horn_to_datalog, lfp_to_datalog
from .trees import PerfectTree, TreeStructure, char_tuple, check, decode, encode, sigma_structure

__version__ = "0.1.0"

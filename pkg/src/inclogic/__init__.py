"""Team semantics for inclusion logic, gfp/lfp evaluation, the translations
between them, and the team Ehrenfeucht-Fraisse game."""

from .fixpoint import (FixpointContext, FixpointEvaluator, available_backends,
                       default_backend, eval_pgfp, gamma, gfp, lfp)
from .oracles import agap_player1_wins, has_cycle, reachability
from .structures import (Relation, Structure, StructureError, Team, all_teams, graph,
                         parse_model, parse_team)
from .syntax import FormulaError, ParseError, PositivityError, parse_formula, to_nnf, to_text
from .team_eval import GuardError, eval_flat, eval_naive, eval_tarski
from .translate import (gfp_to_inc_fo, gfp_to_inc_sentence, inc_to_gfp, is_myopic,
                        myopic_to_inc, wrap_sentence_inc_to_gfp)

__version__ = "0.1.0"

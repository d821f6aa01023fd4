"""Propositional team logics with KLM-style preferential entailment."""

from prefteam.errors import (
    ArityError,
    DomainError,
    DomainTooLargeError,
    FormulaSyntaxError,
    FragmentError,
    ModelError,
    PrefTeamError,
    PreconditionError,
    UnknownVariableError,
)
from prefteam.postulates import (
    SYSTEM_C,
    SYSTEM_P,
    AuditReport,
    RuleId,
    audit,
    check_star,
    check_star_thetas,
    check_triangle,
    literal_corpus,
    monotone_or_violations,
    or_counterexample,
    theta_pairs,
    verify_flattening_theorem,
    verify_theorem_main,
)
from prefteam.preferential import (
    PreferentialModel,
    build_builtin,
    check_smoothness,
    check_standard,
    entails_nm,
    load_model,
    min_states,
    parse_model,
    random_standard_model,
    singleton_projection,
    states_of,
)
from prefteam.semantics import (
    check_closure_properties,
    classical_entails,
    entails,
    equivalent,
    mod_set,
    satisfies,
    satisfies_reference,
)
from prefteam.syntax import (
    BOT,
    TOP,
    And,
    Bottom,
    Dep,
    Formula,
    Fragment,
    Inc,
    NegLiteral,
    Or,
    PosLiteral,
    Top,
    cardinality_formula,
    classify,
    flatten,
    generate_corpus,
    parse,
    theta_formula,
    to_text,
)
from prefteam.teams import Team, TeamDomain, TeamFamily, parse_team, format_team, read_team

__version__ = "0.1.0"

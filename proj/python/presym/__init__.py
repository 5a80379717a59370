"""Exact presymplectic constraint analysis and reduction."""

from _presym import (  # noqa: F401
    Chart,
    Field,
    Form,
    Model,
    Poly,
    builtin_model_text,
    builtin_models,
    d,
    integrate_closed_one_form,
    interior,
    lie_bracket,
    lie_derivative,
    verify_text,
    wedge,
)

__all__ = [
    "Chart",
    "Field",
    "Form",
    "Model",
    "Poly",
    "builtin_model_text",
    "builtin_models",
    "d",
    "integrate_closed_one_form",
    "interior",
    "lie_bracket",
    "lie_derivative",
    "verify_text",
    "wedge",
]

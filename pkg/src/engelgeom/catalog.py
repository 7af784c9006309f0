"""Built-in canonical submanifolds.

Each entry is a polynomial parametrization over ``[-1, 1]`` or ``[-1, 1]^2``:

=================  ===============================  ======
id                 parametrization                  degree
=================  ===============================  ======
plane              (u1, u2, 0, 0)                   4
x1x3-plane         (u1, 0, u3, 0)                   4
deg3-surface       (u1, u2, u1 u2, u1**2 u2 / 2)    3
x1-line            (t, 0, 0, 0)                     1
x3-line            (0, 0, t, 0)                     2
x4-line            (0, 0, 0, t)                     3
parabola-14        (t, 0, 0, t**2)                  3
parabola-34        (0, 0, t, t**2)                  3
=================  ===============================  ======
"""

from __future__ import annotations

from .submanifold import ParamSubmanifold

SQUARE = ((-1.0, 1.0), (-1.0, 1.0))
INTERVAL = ((-1.0, 1.0),)

_DEFINITIONS = {
    "plane": ([[((1, 0), 1.0)], [((0, 1), 1.0)], [], []], SQUARE),
    "x1x3-plane": ([[((1, 0), 1.0)], [], [((0, 1), 1.0)], []], SQUARE),
    "deg3-surface": ([[((1, 0), 1.0)], [((0, 1), 1.0)], [((1, 1), 1.0)], [((2, 1), 0.5)]],
                     SQUARE),
    "x1-line": ([[((1,), 1.0)], [], [], []], INTERVAL),
    "x3-line": ([[], [], [((1,), 1.0)], []], INTERVAL),
    "x4-line": ([[], [], [], [((1,), 1.0)]], INTERVAL),
    "parabola-14": ([[((1,), 1.0)], [], [], [((2,), 1.0)]], INTERVAL),
    "parabola-34": ([[], [], [((1,), 1.0)], [((2,), 1.0)]], INTERVAL),
}

EXPECTED_DEGREES = {
    "plane": 4,
    "x1x3-plane": 4,
    "deg3-surface": 3,
    "x1-line": 1,
    "x3-line": 2,
    "x4-line": 3,
    "parabola-14": 3,
    "parabola-34": 3,
}

# an interior parameter point of maximal pointwise degree for each entry
MAX_DEGREE_POINTS = {
    "plane": (0.5, 0.0),
    "x1x3-plane": (0.5, 0.0),
    "deg3-surface": (0.0, 0.5),
    "x1-line": (0.0,),
    "x3-line": (0.0,),
    "x4-line": (0.0,),
    "parabola-14": (0.5,),
    "parabola-34": (0.5,),
}

BUILTIN_IDS = tuple(_DEFINITIONS)


def builtin_terms(name: str):
    """``(coordinate terms, domain)`` of a built-in, as used in definition files."""
    try:
        return _DEFINITIONS[name]
    except KeyError:
        raise KeyError(f"unknown submanifold id {name!r}; known: {', '.join(BUILTIN_IDS)}") from None


def builtin(name: str, domain=None) -> ParamSubmanifold:
    """A built-in submanifold, optionally over another parameter box."""
    terms, default = builtin_terms(name)
    return ParamSubmanifold.from_terms(terms, default if domain is None else domain, name=name)

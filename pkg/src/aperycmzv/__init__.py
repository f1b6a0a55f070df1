"""Apery-type central-binomial series as level-4 colored multiple zeta values.

Public surface:

* :func:`aperycmzv.series.parse_spec` / :class:`aperycmzv.series.SeriesSpec`
  -- the series DSL;
* :func:`aperycmzv.series.oracle_eval` -- independent direct summation;
* :func:`aperycmzv.normalize.canonicalize` -- rewriting into canonical specs;
* :func:`aperycmzv.compiler.compile_spec` / ``compile_squared`` -- omega-words;
* :func:`aperycmzv.pipeline.evaluate_series` -- the full numeric pipeline;
* :func:`aperycmzv.pipeline.cmzv_expression` -- the CMZV lowering at x = 1;
* :mod:`aperycmzv.catalog` -- reference constants and integer relations.
"""

__version__ = "0.1.0"

from .series import SeriesSpec, parse_spec, validate, oracle_eval  # noqa: F401
from .normalize import canonicalize  # noqa: F401
from .compiler import compile_spec, compile_squared  # noqa: F401
from .pipeline import evaluate_series, cmzv_expression  # noqa: F401
from .catalog import constant, find_relation  # noqa: F401

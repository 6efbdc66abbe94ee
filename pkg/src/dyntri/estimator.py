"""Estimator-style front end: fit on a template, transform to unrolled triangulations."""

from __future__ import annotations

import os

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engine import EngineSettings
from .pipeline import K_VIRTUAL, Assembly, run_pipeline
from .template import Template, TemplateError, load_template, parse_template, validate


def as_template(X) -> Template:
    """Accept a Template, a path to a template file, or template text."""
    if isinstance(X, Template):
        problems = validate(X)
        if problems:
            raise TemplateError("; ".join(problems))
        return X
    if isinstance(X, os.PathLike) or (isinstance(X, str) and "\n" not in X and os.path.exists(X)):
        return load_template(X)
    if isinstance(X, str):
        return parse_template(X)
    raise TypeError(f"cannot build a template from {type(X).__name__}")


class DynamicTriangulator(BaseEstimator):
    """Find a boundary, repartition the template and triangulate its pieces.

    Parameters
    ----------
    M : int
        Number of chunks the boundary may span.
    S : int
        Chunks between consecutive boundaries of the new template.
    j : str
        Interface quality: ``size``, ``fillin``, ``weight``, ``global-mc`` or ``global-weight``.
    direction : str
        ``left``, ``right`` or ``best``.
    basic_interface : bool
        Keep the initial interface instead of searching.
    heuristics : str
        Comma-separated elimination heuristic chain.
    seed : int
    budget : float
        Seconds for the anytime engine; 0 runs the heuristic chain once.
    exhaustive_limit : int
    objective : str
        ``maxclique`` or ``weight``.
    k_virtual : int
        Copies of the new chunk used by :meth:`score`.

    Attributes
    ----------
    template_ : Template
    repartition_ : RepartitionedTemplate
    triangulation_ : TriangulatedTemplate
    boundary_ : BoundaryResult or None
    """

    def __init__(self, M=1, S=1, j="size", direction="best", basic_interface=False,
                 heuristics="fillin,cliqueSize", seed=0, budget=0.0, exhaustive_limit=10,
                 objective="maxclique", k_virtual=K_VIRTUAL):
        self.M = M
        self.S = S
        self.j = j
        self.direction = direction
        self.basic_interface = basic_interface
        self.heuristics = heuristics
        self.seed = seed
        self.budget = budget
        self.exhaustive_limit = exhaustive_limit
        self.objective = objective
        self.k_virtual = k_virtual

    def engine_settings(self) -> EngineSettings:
        return EngineSettings(heuristics=self.heuristics, seed=self.seed, budget=self.budget,
                              exhaustive_limit=self.exhaustive_limit, objective=self.objective)

    def fit(self, X, y=None):
        t = as_template(X)
        res = run_pipeline(t, self.M, self.S, self.j, self.direction, self.basic_interface,
                           self.engine_settings())
        self.template_ = t
        self.repartition_ = res.rt
        self.triangulation_ = res.tt
        self.boundary_ = res.rt.boundary
        self.maxclique_ = res.tt.maxclique
        return self

    def transform(self, X) -> Assembly | list[Assembly]:
        """Assemble the triangulation for ``X`` copies of the new chunk (int or list of ints)."""
        check_is_fitted(self, "triangulation_")
        if isinstance(X, int):
            return self.triangulation_.assemble(X)
        return [self.triangulation_.assemble(int(k)) for k in X]

    def fit_transform(self, X, y=None, k: int = 1):
        return self.fit(X).transform(k)

    def score(self, X=None, y=None) -> float:
        """Negative log10 state space of ``k_virtual`` copies (higher is better)."""
        check_is_fitted(self, "triangulation_")
        return -self.triangulation_.log_weight(self.k_virtual)

    def report(self, k: int | None = None) -> dict:
        check_is_fitted(self, "triangulation_")
        return {
            "repartition": self.repartition_.to_dict(),
            "triangulation": self.triangulation_.summary(k, self.k_virtual),
        }

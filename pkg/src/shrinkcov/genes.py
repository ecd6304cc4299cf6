"""Gene-expression pipeline: BW ranking, per-group intensity tables, QQ data."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from ._errors import DataError
from .linalg import as_data_matrix
from .shrinkage import lambda_diagonal, lambda_identity, lambda_spherical, nu_hat
from .traces import min_obs, traces_fast

REPORT_FIELDS = (
    "group", "p", "n", "lambda_spherical", "nu_hat", "lambda_diagonal",
    "var_range", "lambda_identity",
)


@dataclass
class GeneTable:
    expressions: np.ndarray  # observations x genes
    gene_ids: list
    group_labels: list

    def __post_init__(self):
        self.expressions = as_data_matrix(self.expressions, name="expressions")
        n, g = self.expressions.shape
        if self.gene_ids is None:
            self.gene_ids = [str(i + 1) for i in range(g)]
        self.gene_ids = [str(x) for x in self.gene_ids]
        self.group_labels = [str(x) for x in self.group_labels]
        if len(self.gene_ids) != g:
            raise DataError(f"{len(self.gene_ids)} gene ids for {g} genes")
        if len(self.group_labels) != n:
            raise DataError(f"{len(self.group_labels)} labels for {n} observations")

    @property
    def groups(self):
        """Distinct labels in order of first appearance."""
        return list(dict.fromkeys(self.group_labels))

    def rows_of(self, group):
        return np.array([lab == group for lab in self.group_labels])

    def log10(self):
        if np.any(self.expressions <= 0):
            raise DataError("log10 transform requires strictly positive expression values")
        return GeneTable(np.log10(self.expressions), self.gene_ids, self.group_labels)


@dataclass
class BWRanking:
    order: np.ndarray  # gene indices, best first
    scores: np.ndarray  # BW score per gene, in original gene order

    @property
    def infinite(self):
        """Genes with zero within-group spread but distinct group means."""
        return np.flatnonzero(np.isinf(self.scores))


def bw_scores(table):
    """Between-group over within-group sum of squares for every gene.

    Between-group terms are weighted by group size. A gene with no within-group
    spread scores ``inf`` if its group means differ, and 0 if it is constant.
    """
    x = table.expressions
    groups = table.groups
    if len(groups) < 2:
        raise DataError("BW ranking needs at least two groups")
    grand = x.mean(axis=0)
    between = np.zeros(x.shape[1])
    within = np.zeros(x.shape[1])
    for g in groups:
        xg = x[table.rows_of(g)]
        if xg.shape[0] < 2:
            raise DataError(f"group {g!r} has fewer than 2 observations")
        mg = xg.mean(axis=0)
        between += xg.shape[0] * np.square(mg - grand)
        within += np.square(xg - mg).sum(axis=0)
    scores = np.zeros_like(between)
    pos = within > 0
    scores[pos] = between[pos] / within[pos]
    scores[~pos & (between > 0)] = np.inf
    return scores


def bw_rank(table):
    scores = bw_scores(table)
    return BWRanking(np.argsort(-scores, kind="stable"), scores)


def genes_report(table, tops, log10=False, centered=False):
    """Per group and per top-``p`` gene set: intensities, nu_hat and variance range.

    Genes are ranked once on all observations; every group then uses the same
    top-``p`` gene list.
    """
    if log10:
        table = table.log10()
    n_genes = table.expressions.shape[1]
    tops = [int(t) for t in tops]
    for t in tops:
        if not 1 <= t <= n_genes:
            raise DataError(f"top-{t} requested but the table has {n_genes} genes")
    ranking = bw_rank(table)
    need = min_obs(centered)
    rows = []
    for g in table.groups:
        xg = table.expressions[table.rows_of(g)]
        if xg.shape[0] < need:
            raise DataError(
                f"group {g!r} requires at least {need} observations, got {xg.shape[0]}"
            )
        for t in tops:
            sub = xg[:, ranking.order[:t]]
            stats = traces_fast(sub, centered=centered)
            if centered:
                var = np.square(sub).mean(axis=0)
            else:
                var = sub.var(axis=0, ddof=1)
            rows.append({
                "group": g,
                "p": t,
                "n": sub.shape[0],
                "lambda_spherical": lambda_spherical(stats),
                "nu_hat": nu_hat(stats),
                "lambda_diagonal": lambda_diagonal(stats),
                "var_range": float(var.max() - var.min()),
                "lambda_identity": lambda_identity(stats),
            })
    return rows, ranking


def qq_data(table, genes):
    """Normal QQ pairs for the given gene indices, separately for each group.

    Returns a list of dicts with ``gene``, ``group``, ``rank``, ``theoretical`` and
    ``sample``; theoretical quantiles are taken at ``(i - 0.5) / n``.
    """
    n_genes = table.expressions.shape[1]
    out = []
    for gi in genes:
        gi = int(gi)
        if not 0 <= gi < n_genes:
            raise DataError(f"gene index {gi} out of range 0..{n_genes - 1}")
        for g in table.groups:
            values = np.sort(table.expressions[table.rows_of(g), gi])
            n = values.size
            q = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
            for i in range(n):
                out.append({
                    "gene": table.gene_ids[gi],
                    "group": g,
                    "rank": i + 1,
                    "theoretical": float(q[i]),
                    "sample": float(values[i]),
                })
    return out

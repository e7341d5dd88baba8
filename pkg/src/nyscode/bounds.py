"""Reconstruction-error bound and the two-point saturation model.

The sampling condition c >= 64 k / eps^4 gives, at equality, the smallest
admissible eps for a codebook of size c: eps = (64 k / c)^(1/4). Plugging it
into the column-sampling bound yields

    ||C - C_hat||_F <= ||C - C_k||_F + (64 k / c)^(1/4) * N max_i C_ii

which as a function of c has the shape O + M * c^(-1/4). The same two-constant
family describes kernel reconstruction error and, with the sign flipped,
accuracy approaching its asymptote from below: A - B * c^(-1/4). Both constants
are always determined from exactly two observed (c, value) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .spectra import SpectralReport

ERROR_FORM = "error"
ACCURACY_FORM = "accuracy"
_FORMS = (ERROR_FORM, ACCURACY_FORM)

FitPoint = tuple[float, float]  # (codebook size, observed value)


@dataclass(frozen=True)
class SaturationModel:
    """Two-constant model value(c) = offset +/- slope * c^(-1/4).

    ``form="error"`` uses the plus sign (value decays toward ``offset``);
    ``form="accuracy"`` uses the minus sign (value rises toward ``offset``).
    ``flagged`` marks an accuracy fit whose slope came out negative, i.e. the
    two observations do not show saturation from below.
    """

    offset: float
    slope: float
    form: str
    fit_points: tuple[FitPoint, FitPoint]
    flagged: bool = False

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "offset": self.offset,
            "slope": self.slope,
            "fit_points": [list(p) for p in self.fit_points],
            "flagged": self.flagged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SaturationModel":
        return cls(
            offset=float(d["offset"]),
            slope=float(d["slope"]),
            form=d["form"],
            fit_points=tuple((float(c), float(v)) for c, v in d["fit_points"]),
            flagged=bool(d.get("flagged", False)),
        )


def epsilon_min(c: int, k: int) -> float:
    """Smallest eps admitted by the sampling condition at equality: (64 k / c)^(1/4)."""
    if c < 1 or k < 1:
        raise ValueError(f"need c >= 1 and k >= 1, got c={c}, k={k}")
    return (64.0 * k / c) ** 0.25


def eval_eq1_bound(report: SpectralReport, c: int) -> float:
    """Evaluate the code-reconstruction bound at codebook size c."""
    return report.rank_k_residual + epsilon_min(c, report.k) * report.scaled_diag_max


def fit_two_point(p1: FitPoint, p2: FitPoint, form: str) -> SaturationModel:
    """Solve value_i = offset +/- slope * c_i^(-1/4) exactly from two points."""
    if form not in _FORMS:
        raise ValueError(f"form must be one of {_FORMS}, got {form!r}")
    (c1, v1), (c2, v2) = p1, p2
    if c1 < 1 or c2 < 1:
        raise ValueError("codebook sizes must be >= 1")
    if c1 == c2:
        raise ValueError(f"fit points need distinct codebook sizes, both are {c1}")
    sign = 1.0 if form == ERROR_FORM else -1.0
    t1 = float(c1) ** -0.25
    t2 = float(c2) ** -0.25
    slope = (v1 - v2) / (sign * (t1 - t2))
    offset = v1 - sign * slope * t1
    flagged = form == ACCURACY_FORM and slope < 0.0
    return SaturationModel(
        offset=offset,
        slope=slope,
        form=form,
        fit_points=((float(c1), float(v1)), (float(c2), float(v2))),
        flagged=flagged,
    )


def predict(model: SaturationModel, c: int) -> float:
    """Evaluate the saturation model at codebook size c."""
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    sign = 1.0 if model.form == ERROR_FORM else -1.0
    return model.offset + sign * model.slope * float(c) ** -0.25

"""Numerical matrix representations of presented algebras.

Floating point is quarantined here: the searcher looks for d×d complex
matrices making every relation (nearly) vanish, by gradient descent
with random restarts.  A found model certifies noncommutativity or
distinctness of presented elements; failure to find one proves
nothing.  Symbolic modules accept a model as a separation certificate
only when the margin dwarfs the model's residual.
"""

from dataclasses import dataclass, field

import numpy as np

from .star_presentation import FreeStarPoly, Presentation

MODEL_FORMAT_VERSION = 1


class NoModelError(ValueError):
    """An operation needed a representation that is not available."""


@dataclass
class MatrixModel:
    """A floating representation: one matrix per generator.

    Starred letters evaluate to the conjugate transpose of their
    partner's matrix.  `residual` is the max Frobenius norm over the
    relation evaluations at the time of construction.
    """

    dimension: int
    matrices: dict  # generator name -> complex (d, d) ndarray
    residual: float
    seed: int
    trace: dict = field(default_factory=dict)

    def eval_poly(self, p: FreeStarPoly) -> np.ndarray:
        d = self.dimension
        out = np.zeros((d, d), dtype=complex)
        for w, c in p.terms.items():
            acc = np.eye(d, dtype=complex)
            for name, star in w:
                m = self.matrices[name]
                acc = acc @ (m.conj().T if star else m)
            out += complex(c) * acc
        return out

    def separation(self, p: FreeStarPoly, q: FreeStarPoly) -> float:
        """Operator norm of the evaluated difference."""
        return float(np.linalg.norm(self.eval_poly(p - q), 2))

    def recompute_residual(self, pres: Presentation) -> float:
        return residual(pres, self.matrices, self.dimension)


def _frobenius(m) -> float:
    return float(np.linalg.norm(m, "fro"))


def residual(pres: Presentation, matrices, dimension: int) -> float:
    """Max Frobenius norm of the relation evaluations."""
    model = MatrixModel(dimension, matrices, 0.0, 0)
    worst = 0.0
    for r in pres.relations:
        worst = max(worst, _frobenius(model.eval_poly(r)))
    return worst


def projection_generators(pres: Presentation) -> set:
    """Generators declared self-adjoint with a literal g·g − g relation."""
    keys = {r.sort_key() for r in pres.relations}
    out = set()
    for g in pres.gens:
        if not g.self_adjoint:
            continue
        x = pres.alg.gen(g.name)
        if (x * x - x).sort_key() in keys:
            out.add(g.name)
    return out


def nearest_projection(m: np.ndarray) -> np.ndarray:
    """Hermitize, then threshold the spectrum at 1/2."""
    h = (m + m.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(h)
    keep = vals >= 0.5
    return (vecs[:, keep] @ vecs[:, keep].conj().T).astype(complex)


def _loss_and_grads(pres: Presentation, matrices, d):
    """Σ over relations of squared Frobenius norm, with the complex
    gradients with respect to each generator matrix."""
    loss = 0.0
    grads = {name: np.zeros((d, d), dtype=complex) for name in matrices}
    eye = np.eye(d, dtype=complex)
    for rel in pres.relations:
        evaluated = {}
        for w, c in rel.terms.items():
            mats = [
                matrices[n].conj().T if s else matrices[n] for n, s in w
            ]
            prefix = [eye]
            for m in mats:
                prefix.append(prefix[-1] @ m)
            evaluated[w] = (complex(c), mats, prefix)
        r_val = sum(c * pref[-1] for c, _, pref in evaluated.values())
        loss += float(np.real(np.trace(r_val @ r_val.conj().T)))
        for w, (c, mats, prefix) in evaluated.items():
            suffix = [eye]
            for m in reversed(mats):
                suffix.append(m @ suffix[-1])
            suffix.reverse()
            for pos, (name, star) in enumerate(w):
                a = prefix[pos]
                b = suffix[pos + 1]
                if star:
                    grads[name] += 2.0 * c * (b @ r_val.conj().T @ a)
                else:
                    grads[name] += 2.0 * np.conj(c) * (
                        a.conj().T @ r_val @ b.conj().T
                    )
    return loss, grads


def find_representation(
    pres: Presentation,
    dimension: int,
    restarts: int = 20,
    iters: int = 400,
    tol: float = 1e-8,
    seed: int = 0,
) -> MatrixModel:
    """Search for a d-dimensional model minimizing the relation residual.

    Projection generators (self-adjoint with a literal idempotent
    relation) start as random orthogonal projections and are snapped
    back to the nearest projection after every step.  Restarts draw
    from a counter-based generator, so results are reproducible for a
    fixed seed; the best (lowest) residual wins, earliest restart on
    ties.  Success means residual ≤ tol — inspect the returned model.
    """
    if dimension < 1:
        raise ValueError("dimension must be at least 1")
    proj = projection_generators(pres)
    names = [g.name for g in pres.gens]
    best = None
    per_restart = []
    for restart in range(restarts):
        rng = np.random.Generator(
            np.random.Philox(key=(seed << 64) + restart)
        )
        matrices = {}
        for name in names:
            raw = rng.standard_normal((dimension, dimension)) + 1j * (
                rng.standard_normal((dimension, dimension))
            )
            if name in proj:
                q, _ = np.linalg.qr(raw)
                rank = int(rng.integers(0, dimension + 1))
                matrices[name] = (
                    q[:, :rank] @ q[:, :rank].conj().T
                ).astype(complex)
            else:
                matrices[name] = raw / np.sqrt(dimension)
        lr0 = 0.15
        for it in range(iters):
            loss, grads = _loss_and_grads(pres, matrices, dimension)
            if loss < (tol * 1e-2) ** 2:
                break
            lr = lr0 * (0.01 + 0.99 * 0.5 * (1 + np.cos(np.pi * it / iters)))
            for name in names:
                matrices[name] = matrices[name] - lr * grads[name]
                if name in proj:
                    matrices[name] = nearest_projection(matrices[name])
        res = residual(pres, matrices, dimension)
        per_restart.append(res)
        if best is None or res < best[0]:
            best = (res, restart, matrices)
    res, restart, matrices = best
    return MatrixModel(
        dimension=dimension,
        matrices=matrices,
        residual=res,
        seed=seed,
        trace={
            "restarts": restarts,
            "iters": iters,
            "tol": tol,
            "best_restart": restart,
            "per_restart_residuals": per_restart,
        },
    )


def commutator_witness(model: MatrixModel, a, b) -> float:
    """Operator norm of the commutator of two evaluated elements."""
    if model is None:
        raise NoModelError("no representation available")
    ma = model.eval_poly(a) if isinstance(a, FreeStarPoly) else model.matrices[a]
    mb = model.eval_poly(b) if isinstance(b, FreeStarPoly) else model.matrices[b]
    return float(np.linalg.norm(ma @ mb - mb @ ma, 2))


# ---------------------------------------------------------------------------
# model files (versioned text format)
# ---------------------------------------------------------------------------
#
#   qmor-model <version>
#   dimension <d>
#   seed <seed>
#   residual <repr(float)>
#   matrix <generator name>
#   <re>,<im> <re>,<im> ...        (d rows, row-major)
#


def save_model(model: MatrixModel, path) -> None:
    lines = [
        f"qmor-model {MODEL_FORMAT_VERSION}",
        f"dimension {model.dimension}",
        f"seed {model.seed}",
        f"residual {model.residual!r}",
    ]
    for name in sorted(model.matrices):
        lines.append(f"matrix {name}")
        for row in model.matrices[name]:
            lines.append(
                " ".join(f"{z.real!r},{z.imag!r}" for z in row)
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> MatrixModel:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = lines[0].split()
    if header[:1] != ["qmor-model"] or int(header[1]) != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model file header: {lines[0]!r}")
    dimension = int(lines[1].split()[1])
    seed = int(lines[2].split()[1])
    res = float(lines[3].split()[1])
    matrices = {}
    i = 4
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        _, name = lines[i].split()
        rows = []
        for r in range(dimension):
            row = [
                complex(float(p.split(",")[0]), float(p.split(",")[1]))
                for p in lines[i + 1 + r].split()
            ]
            rows.append(row)
        matrices[name] = np.array(rows, dtype=complex)
        i += 1 + dimension
    return MatrixModel(dimension, matrices, res, seed)

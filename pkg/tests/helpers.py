"""Random admissible draws shared by property and acceptance tests."""
from fractions import Fraction
import warnings

from qes.model import RegionWarning, make_model, make_row

HALF = Fraction(1, 2)


def draw_row(rng, row_id=None, n_max=5):
    """(model, row) for a random admissible parameter set of the given (or a random) row."""
    ids = ["1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "2.1", "2.2", "3.1", "3.2", "3.3"]
    rid = row_id or ids[int(rng.integers(len(ids)))]
    n = int(rng.integers(0, n_max + 1))
    u = float(rng.uniform(0, 3))
    if rid in ("1.1", "1.2", "1.4"):
        A = {"1.1": Fraction(n), "1.2": Fraction(n + 1), "1.4": n + HALF}[rid]
        fam, B = "I", float(A) + u
    elif rid in ("1.3", "1.5", "1.6"):
        B = {"1.3": Fraction(n + 1), "1.5": n + HALF, "1.6": n + 3 * HALF}[rid]
        fam, A = "I", float(B) - 1 + u
    elif rid == "2.1":
        fam, A, B = "II", n + HALF, float(rng.uniform(-0.5, 3))
    elif rid == "2.2":
        fam, A, B = "II", n + HALF, float(rng.uniform(-0.5, 0))
    else:
        A = {"3.1": Fraction(n), "3.2": Fraction(n + 1), "3.3": n + HALF}[rid]
        fam, B = "III", float(rng.uniform(-3, 3))
    m = float(rng.uniform(0.02, 0.98))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegionWarning)
        model = make_model(fam, A, B, m)
    return model, make_row(model, rid)

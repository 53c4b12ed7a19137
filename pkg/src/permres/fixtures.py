"""Small named modules with known cohomology, used by tests and the CLI docs."""

from __future__ import annotations

from pathlib import Path

from .groups import FiniteGroup, cyclic, direct_product
from .linalg import IntegerMatrix
from .modules import (
    FiniteModule,
    Lattice,
    PermutationStructure,
    augmentation_ideal,
    finite_module_from_generators,
    lattice_from_generators,
    permutation_module,
)


def klein_four() -> FiniteGroup:
    """Z/2 x Z/2 with generators sigma = element 2 and tau = element 1."""
    G = direct_product(cyclic(2), cyclic(2))
    G.name = "Z/2 x Z/2"
    return G


KLEIN_SIGMA = 2
KLEIN_TAU = 1


def klein_cube_module() -> FiniteModule:
    """(Z/4)^3 with sigma(a,b,c) = (b, a, -a-b-c) and tau(a,b,c) = (c, -a-b-c, a).

    H^1 = Z/4 is not killed by the exponent 2, so no permutation presentation exists.
    """
    G = klein_four()
    sigma = IntegerMatrix([[0, 1, 0], [1, 0, 0], [-1, -1, -1]])
    tau = IntegerMatrix([[0, 0, 1], [-1, -1, -1], [1, 0, 0]])
    return finite_module_from_generators(G, IntegerMatrix.diagonal([4, 4, 4]),
                                         {KLEIN_SIGMA: sigma, KLEIN_TAU: tau})


def klein_twisted_z8() -> FiniteModule:
    """Z/8 with sigma = -1 and tau = 3; H^1 = Z/2 although no presentation exists."""
    G = klein_four()
    return finite_module_from_generators(G, IntegerMatrix([[8]]),
                                         {KLEIN_SIGMA: IntegerMatrix([[-1]]), KLEIN_TAU: IntegerMatrix([[3]])})


def trivial_z2() -> FiniteModule:
    """Z/2 with trivial action of Z/2."""
    G = cyclic(2)
    return finite_module_from_generators(G, IntegerMatrix([[2]]), {1: IntegerMatrix([[1]])})


def sign_z4() -> FiniteModule:
    """Z/4 over Z/2 with the generator acting as -1."""
    G = cyclic(2)
    return finite_module_from_generators(G, IntegerMatrix([[4]]), {1: IntegerMatrix([[-1]])})


def rotation_lattice() -> Lattice:
    """Z^2 over Z/4 with the generator acting as rotation by a quarter turn."""
    G = cyclic(4)
    return lattice_from_generators(G, 2, {1: IntegerMatrix([[0, -1], [1, 0]])})


def augmentation_fixture(n: int) -> Lattice:
    return augmentation_ideal(cyclic(n))


AUGMENTATION_ORDERS = (2, 3, 4, 5, 6, 8, 9, 12, 16)

SHAPIRO_GROUPS = {"Z/4": lambda: cyclic(4), "Z/2 x Z/2": klein_four, "Z/6": lambda: cyclic(6)}


def coset_modules(G: FiniteGroup) -> list[tuple[object, PermutationStructure]]:
    """Z[G/H] for every subgroup H."""
    return [(H, permutation_module(G, [H])) for H in G.all_subgroups]


def fixture_documents() -> dict[str, dict]:
    """Problem files for the bundled fixtures, keyed by file name."""
    from .fileformat import problem_to_json as _doc

    def problem_to_json(G, M, task, **opts):
        d = _doc(G, M, task, **opts)
        d["group"] = {"product": ["2", "2"]} if G.name == "Z/2 x Z/2" else {"cyclic": str(G.order)}
        return d

    docs = {
        "klein_cube.json": problem_to_json(klein_four(), klein_cube_module(), "present"),
        "klein_twisted_z8.json": problem_to_json(klein_four(), klein_twisted_z8(), "cohomology"),
        "trivial_z2.json": problem_to_json(cyclic(2), trivial_z2(), "present"),
        "sign_z4.json": problem_to_json(cyclic(2), sign_z4(), "present"),
        "rotation_z4.json": problem_to_json(cyclic(4), rotation_lattice(), "check"),
    }
    for n in AUGMENTATION_ORDERS:
        docs[f"augmentation_z{n}.json"] = problem_to_json(cyclic(n), augmentation_fixture(n), "cohomology")
    for name, make in SHAPIRO_GROUPS.items():
        G = make()
        tag = name.replace("/", "").replace(" x ", "x").lower()
        for i, (H, P) in enumerate(coset_modules(G)):
            docs[f"shapiro_{tag}_sub{i}.json"] = problem_to_json(G, P.lattice, "cohomology", degree=2)
    return docs


def write_fixture_files(directory: str | Path) -> list[Path]:
    from .fileformat import dumps

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = []
    for name, doc in fixture_documents().items():
        p = d / name
        p.write_text(dumps(doc) + "\n")
        out.append(p)
    return out

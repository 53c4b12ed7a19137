from __future__ import annotations

import copy
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from permres.fileformat import (
    FormatError,
    certificate_to_json,
    dumps,
    parse_certificate,
    parse_problem,
    problem_to_json,
    verify_loaded,
)
from permres.fixtures import fixture_documents, klein_cube_module, sign_z4, trivial_z2
from permres.groups import cyclic, dihedral, symmetric
from permres.linalg import IntegerMatrix
from permres.modules import finite_module_from_generators
from permres.presentation import permutation_resolution
from permres.samples import random_finite_module, random_permutation_module


def roundtrip(G, M):
    pf = parse_problem(dumps(problem_to_json(G, M, "check")))
    assert pf.task == "check"
    assert pf.group.table == G.table
    assert pf.module.rank == M.rank and pf.module.is_lattice == M.is_lattice
    assert all(pf.module.equal_mod(a, b) for a, b in zip(pf.module.action, M.action))
    assert pf.module.relations == M.relations
    return pf


@given(st.integers(0, 10 ** 6))
def test_problem_roundtrip_finite(seed):
    rng = random.Random(seed)
    G = cyclic(rng.choice([2, 3, 4, 6]))
    roundtrip(G, random_finite_module(rng, G, 32))


@given(st.integers(0, 10 ** 6))
def test_problem_roundtrip_lattice(seed):
    rng = random.Random(seed)
    G = rng.choice([symmetric(3), dihedral(4), cyclic(6)])
    roundtrip(G, random_permutation_module(rng, G, 8).lattice)


def test_bundled_fixtures_match_files(tmp_path):
    from pathlib import Path

    here = Path(__file__).resolve().parent.parent / "fixtures"
    for name, doc in fixture_documents().items():
        assert json.loads((here / name).read_text()) == doc
        parse_problem(dumps(doc))


def test_constructor_groups():
    pf = parse_problem(json.dumps({"group": {"product": ["2", "2"]},
                                   "module": {"type": "lattice", "rank": "1", "actions": [[["1"]], [["1"]]]}}))
    assert pf.group.order == 4 and pf.group.exponent == 2
    pf = parse_problem(json.dumps({"group": {"permutations": [["1", "2", "0"], ["1", "0", "2"]]},
                                   "module": {"type": "finite", "moduli": ["3"], "actions": [[["1"]], [["2"]]]}}))
    assert pf.group.order == 6 and pf.module.size == 3


def test_action_by_element_dict():
    pf = parse_problem(json.dumps({"group": {"cyclic": "4"},
                                   "module": {"type": "lattice", "rank": "2",
                                              "actions": {"1": [["0", "-1"], ["1", "0"]]}}}))
    assert pf.module.action[2] == IntegerMatrix([[-1, 0], [0, -1]])


BAD = [
    ('{"group": {"cyclic": "2"}, "module": {"type": "lattice", "rank": "1", "actions": [[["2"]]]}}',
     "group law"),
    ('{"group": {"cyclic": "3"},\n "module": {"type": "lattice",\n "rank": "1",\n "actions": [[["-1"]]]}}',
     "group law"),
    ('{"group": {"cyclic": 2}, "module": {}}', "integer string"),
    ('{"group": {"cyclic": "2"}, "module": {"type": "finite", "rank": "1",\n'
     ' "relations": [["0"]], "actions": [[["1"]]]}}', "finite"),
    ('{"group": {"cyclic": "2"}, "module": {"type": "lattice", "rank": "2", "actions": [[["1"]]]}}', "2x2 matrix"),
    ('{"group": {"table": [["0", "1"], ["1", "1"]]}, "module": {}}', "permutations"),
    ('{"group": {"cyclic": "2"}', "invalid JSON"),
]


@pytest.mark.parametrize("text,needle", BAD)
def test_invalid_problems_report_reason(text, needle):
    with pytest.raises(FormatError) as e:
        parse_problem(text)
    assert needle in str(e.value)


def test_errors_carry_line_numbers():
    text = '{\n "group": {"cyclic": "3"},\n "module": {\n  "type": "lattice",\n  "rank": "x",\n  "actions": []\n }\n}'
    with pytest.raises(FormatError) as e:
        parse_problem(text)
    assert e.value.line == 5 and "line 5" in str(e.value)


# certificates -------------------------------------------------------------------

@pytest.fixture(scope="module")
def sign_cert_text():
    return dumps(certificate_to_json(permutation_resolution(sign_z4())))


def test_certificate_roundtrip(sign_cert_text):
    lc = parse_certificate(sign_cert_text)
    assert verify_loaded(lc) == []
    again = dumps(certificate_to_json(lc.certificate))
    assert json.loads(again) == json.loads(sign_cert_text)


def _integer_paths(doc, path=()):
    if isinstance(doc, dict):
        for k, v in doc.items():
            if k not in ("labels", "digest", "kind", "version", "verdict", "name"):
                yield from _integer_paths(v, path + (k,))
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            yield from _integer_paths(v, path + (i,))
    elif isinstance(doc, str) and doc.lstrip("-").isdigit():
        yield path


def _rejected(doc) -> bool:
    try:
        return bool(verify_loaded(parse_certificate(json.dumps(doc))))
    except FormatError:
        return True


def test_every_single_entry_tamper_is_rejected(sign_cert_text):
    doc = json.loads(sign_cert_text)
    paths = list(_integer_paths(doc))
    assert len(paths) > 100
    for p in paths:
        for delta in (1, -2):
            d = copy.deepcopy(doc)
            x = d
            for k in p[:-1]:
                x = x[k]
            x[p[-1]] = str(int(x[p[-1]]) + delta)
            assert _rejected(d), p


def test_tamper_failure_names_the_equation():
    doc = certificate_to_json(permutation_resolution(trivial_z2()))
    doc["iota"]["rows"][0][0] = str(int(doc["iota"]["rows"][0][0]) + 1)
    fails = verify_loaded(parse_certificate(json.dumps(doc)))
    assert fails and any("iota" in f or "phi ∘ iota" in f for f in fails)


def test_relabeled_certificate_still_passes(sign_cert_text):
    doc = json.loads(sign_cert_text)
    labels = doc["P0"]["labels"]
    doc["P0"]["labels"] = labels[::-1]
    doc["P0"]["labels"][0] = "renamed"
    assert verify_loaded(parse_certificate(json.dumps(doc))) == []


def test_missing_digest_is_reported(sign_cert_text):
    doc = json.loads(sign_cert_text)
    del doc["digest"]
    assert "certificate has no digest" in verify_loaded(parse_certificate(json.dumps(doc)))


def test_not_a_certificate():
    with pytest.raises(FormatError, match="not a certificate"):
        parse_certificate('{"kind": "something"}')


def test_dumps_keeps_rows_on_one_line():
    text = dumps({"rows": [["1", "2"], ["3", "4"]]})
    assert '["1", "2"]' in text and json.loads(text) == {"rows": [["1", "2"], ["3", "4"]]}


def test_round_trip_of_klein_cube_problem():
    M = klein_cube_module()
    roundtrip(M.group, M)


def test_finite_module_with_moduli_shortcut():
    G = cyclic(2)
    pf = parse_problem(json.dumps({"group": {"cyclic": "2"},
                                   "module": {"type": "finite", "moduli": ["2", "4"],
                                              "actions": [[["1", "0"], ["2", "-1"]]]}}))
    M = finite_module_from_generators(G, IntegerMatrix.diagonal([2, 4]), {1: IntegerMatrix([[1, 0], [2, -1]])})
    assert pf.module.size == M.size == 8

import json
import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np
import pytest

from levy_boundary import dragon, typedyn
from levy_boundary.errors import ContractError, ResourceLimitError
from levy_boundary.lattice import (
    P,
    T0,
    LatticeTriangle,
    contains_point,
    exterior_children,
    n0,
    star,
    subdivide,
)

H = Fraction(1, 2)


def test_ifs_map_examples():
    assert dragon.ifs_map(1, P(0, 0)) == P(0, 0)
    assert dragon.ifs_map(2, P(1, 0)) == P(1, 0)
    assert dragon.ifs_map(1, P(1, 0)) == P(H, H)
    with pytest.raises(ContractError):
        dragon.ifs_map(3, P(0, 0))


def test_iterate_small():
    occ0 = dragon.iterate(0)
    assert occ0.triangles == {T0} and occ0.sequence_count == 1
    occ1 = dragon.iterate(1)
    expected = {
        LatticeTriangle.from_vertices(1, (P(0, 0), P(0, H), P(H, H))),
        LatticeTriangle.from_vertices(1, (P(H, H), P(1, H), P(1, 0))),
    }
    assert occ1.triangles == expected == {T0.map(dragon.f1), T0.map(dragon.f2)}


@pytest.mark.parametrize("k", range(0, 13))
def test_maps_agree_with_replacement(k):
    assert dragon.iterate_by_maps(k) == dragon.iterate(k).triangles


def test_iterate_containment_and_parentage():
    carrier = list(n0())
    prev = dragon.iterate(5).triangles
    for t in dragon.iterate(6).triangles:
        c = t.top.midpoint(t.hypotenuse_midpoint)
        assert any(contains_point(p, c) for p in carrier)
    children = {c for t in prev for c in exterior_children(t)}
    assert dragon.iterate(6).triangles == children


def test_iterate_sequence_accounting():
    for k in (3, 9, 14):
        occ = dragon.iterate(k)
        assert len(occ) <= 2**k
        assert int(occ.multiplicity.sum()) == occ.sequence_count == 2**k


def test_neighborhood_type_examples():
    occ0 = dragon.iterate(0)
    assert dragon.neighborhood_type(T0, occ0) == 1
    eight = LatticeTriangle.from_vertices(0, (P(0, 0), P(0, 1), P(H, H)))
    assert dragon.neighborhood_type(eight, occ0) == 512
    assert dragon.neighborhood_type(T0.translated(5, 5), occ0) == 0
    with pytest.raises(ContractError):
        dragon.neighborhood_type(subdivide(T0)[0], occ0)


def test_neighborhood_type_agrees_with_kernel():
    occ = dragon.iterate(6)
    rows = dragon.leaf_rows(occ.encoding, 6)
    fast = dragon.codes_for(rows, occ)
    for i in range(0, len(rows), 37):
        t = occ.encoding.decode(rows[i], 6)
        assert dragon.neighborhood_type(t, occ) == fast[i]


def test_type_census_seed():
    assert dragon.type_census(0) == typedyn.TypeCensus({1 << i: 1 for i in range(15)})


def test_no_covered_before_14():
    for k in range(14):
        assert dragon.type_census(k).get(typedyn.COVERED) == 0


def test_covered_at_14():
    census = dragon.type_census(14)
    assert census[typedyn.COVERED] == 8
    assert dragon.covered_counts(14) == (8, 8)


@pytest.mark.parametrize("k", [0, 3, 8, 12])
def test_census_mass_and_occupied(k):
    census = dragon.type_census(k)
    assert census.mass == 15 * 2**k
    odd = sum(n for c, n in census.items() if c & 1)
    assert odd == len(dragon.iterate(k))


def test_boundary_count_geometric():
    assert dragon.boundary_count_geometric(0) == 1
    assert dragon.boundary_count_geometric(1) == 2
    census = dragon.type_census(14)
    odd = sum(n for c, n in census.items() if c & 1)
    assert dragon.boundary_count_geometric(14) == odd - 8


def test_covered_children_stay_covered():
    k = 15
    occ_k, occ_next = dragon.iterate(k), dragon.iterate(k + 1)
    covered = [occ_k.encoding.decode(r, k)
               for r, c in zip(occ_k.rows, dragon.occupied_types(occ_k)) if c == typedyn.COVERED]
    assert covered
    for t in covered:
        for child in subdivide(t):
            assert dragon.neighborhood_type(child, occ_next) == typedyn.COVERED


def test_threads_do_not_change_census():
    assert dragon.type_census(11, threads=4) == dragon.type_census(11, threads=1)


def test_resource_limit():
    with pytest.raises(ResourceLimitError):
        dragon.iterate(21)
    with pytest.raises(ResourceLimitError):
        dragon.type_census(5, max_depth=4)


def test_render_k0():
    svg = dragon.render(0, "by-class")
    root = ET.fromstring(svg.split("\n", 1)[1])
    polys = root.findall(".//{http://www.w3.org/2000/svg}polygon")
    assert len(polys) == 15
    fills = [p.get("fill") for p in polys]
    assert fills.count(dragon._PALETTE[1]) == 1
    assert fills.count(dragon._PALETTE[0]) == 14


def test_render_deterministic_and_plain():
    assert dragon.render(5) == dragon.render(5)
    plain = dragon.render(5, "plain")
    assert plain.count("<polygon") == len(dragon.iterate(5))
    with pytest.raises(ContractError):
        dragon.render(2, "fancy")


def test_render_k5_classes():
    svg = dragon.render(5)
    assert svg.count("<polygon") == 15 * 32
    assert svg.count(dragon._PALETTE[1]) == 32
    assert dragon._PALETTE[2] not in svg


def test_render_k14_marks_covered():
    svg = dragon.render(14)
    assert svg.count(f'fill="{dragon._PALETTE[2]}"') == 8


def test_encoding_round_trip():
    enc = dragon.Encoding(9)
    t = subdivide(subdivide(T0)[1])[0]
    assert enc.decode(enc.encode(t), t.level) == t


@pytest.mark.parametrize("path", [(0,) * 9, (1, 0, 1, 1, 0, 0, 1, 0, 1), (1,) * 10])
def test_star_key_offsets(path):
    deep = T0
    for choice in path:
        deep = subdivide(deep)[choice]
    enc = dragon.Encoding(deep.level)
    deltas = enc.star_deltas(deep.level)
    row = np.array([enc.encode(deep)])
    key, orient = enc.keys(row)[0], dragon._orient(row)[0]
    for i, s in enumerate(star(deep)):
        assert enc.keys(np.array(enc.encode(s)))[0] == key + deltas[orient, i]


def test_census_json_export():
    from levy_boundary import export
    census = dragon.type_census(3)
    text = json.dumps(export.census_map(census))
    assert export.read_census(text) == census
    assert all(isinstance(k, str) and k.isdigit() for k in json.loads(text))

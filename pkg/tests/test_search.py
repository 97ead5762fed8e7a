from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from brieskorn.ke import PairMode, check_ke, derive
from brieskorn.search import (
    FamilyKind,
    Search,
    SearchCheckpoint,
    Tally,
    classify,
    generate_family,
    prefix_tasks,
    sylvester,
)
from brieskorn.topology import Criterion, Kervaire, build_graph, is_homotopy_sphere


def brute_families(m, cap, mode=PairMode.INCLUDE_DIAGONAL):
    out = []
    for combo in combinations_with_replacement(range(2, cap + 1), m):
        seq = derive(combo)
        if check_ke(seq, mode).passes and is_homotopy_sphere(build_graph(seq))[0]:
            out.append(seq.a)
    return out


class TestSylvester:
    def test_terms(self):
        assert [sylvester(k) for k in range(1, 8)] == [2, 3, 7, 43, 1807, 3263443, 10650056950807]

    def test_product_identity(self):
        prod = 1
        for k in range(1, 12):
            assert sylvester(k) == prod + 1
            prod *= sylvester(k)

    def test_reciprocals(self):
        for k in range(1, 9):
            s = sum(Fraction(1, sylvester(i)) for i in range(1, k + 1))
            assert s == 1 - Fraction(1, sylvester(k + 1) - 1)

    def test_rejects(self):
        with pytest.raises(ValueError):
            sylvester(0)


class TestEnumeration:
    @pytest.mark.parametrize("cap", [12, 30])
    def test_dim5_capped_matches_brute(self, cap):
        got = [r.a for r in Search(5, max_last=cap).records()]
        assert got == brute_families(4, cap)

    def test_dim5_capped_off_diagonal(self):
        got = [r.a for r in Search(5, PairMode.OFF_DIAGONAL_ONLY, max_last=25).records()]
        assert got == brute_families(4, 25, PairMode.OFF_DIAGONAL_ONLY)

    def test_dim7_capped_matches_brute(self):
        got = [r.a for r in Search(7, max_last=14).records()]
        assert got == brute_families(5, 14)

    def test_dim5_full(self, dim5):
        search, records = dim5
        assert len(records) == 68
        assert search.finished
        assert len({r.a for r in records}) == 68
        assert [r.a for r in records] == sorted(r.a for r in records)
        assert all(r.link.kervaire is Kervaire.STANDARD for r in records)
        assert search.tally.alt_total == 68

    def test_tally_invariants(self, dim7):
        search, records = dim7
        t = search.tally
        assert t.total == len(records) == sum(t.classes.values())
        assert t.contact_violations == [] and t.tau_violations == []

    def test_jobs_deterministic(self):
        one = [r.a for r in Search(7, max_last=60, jobs=1).records()]
        two = [r.a for r in Search(7, max_last=60, jobs=2).records()]
        assert one == two and one

    def test_prefix_tasks_sorted(self):
        tasks = prefix_tasks(7)
        assert tasks == sorted(set(tasks))
        # (2, 2) already sums to 1 and is pruned
        assert tasks[0] == (2, 3)

    @pytest.mark.parametrize("dim", [3, 4, 6])
    def test_bad_dimension(self, dim):
        with pytest.raises(ValueError):
            Search(dim)


class TestCheckpoint:
    def test_resume_equivalent(self, tmp_path):
        path = tmp_path / "ck.json"
        full = [r.a for r in Search(7, max_last=50).records()]

        saved = []
        first = Search(7, max_last=50, on_prefix_complete=lambda c: (c.save(path), saved.append(c)))
        head = [r.a for r in first.records(stop_after_prefixes=3)]
        assert not first.finished and saved

        resumed = Search(7, max_last=50, resume=SearchCheckpoint.load(path))
        tail = [r.a for r in resumed.records()]
        assert resumed.finished
        assert head + tail == full
        ref = Search(7, max_last=50)
        list(ref.records())
        assert resumed.tally.to_dict() == ref.tally.to_dict()

    def test_roundtrip(self, tmp_path):
        ck = SearchCheckpoint(7, PairMode.OFF_DIAGONAL_ONLY, 40, (2, 5), Tally(total=3, classes={"1": 3}), 99)
        ck.save(tmp_path / "c.json")
        assert SearchCheckpoint.load(tmp_path / "c.json") == ck
        assert list(tmp_path.iterdir()) == [tmp_path / "c.json"]

    def test_mismatch(self, tmp_path):
        ck = SearchCheckpoint(7, PairMode.INCLUDE_DIAGONAL, 40, (2, 5), Tally())
        with pytest.raises(ValueError):
            Search(7, max_last=41, resume=ck)

    def test_bad_document(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text('{"format": "other"}')
        with pytest.raises(ValueError):
            SearchCheckpoint.load(p)


class TestClassify:
    def test_dim7_record(self):
        rec = classify(derive([2, 3, 7, 43, 1333]))
        assert rec.tau == 224000
        assert rec.link.bp_class == 0
        assert rec.moduli_real_dim == 82
        assert rec.contact_excluded
        assert rec.class_key == "0"

    def test_needs_four(self):
        with pytest.raises(ValueError):
            classify(derive([2, 3, 5]))

    def test_non_sphere_has_no_class(self):
        rec = classify(derive([2, 3, 6, 7]))
        assert rec.class_key is None


class TestFamilies:
    @pytest.mark.parametrize("m, n", [(4, 2), (5, 14), (6, 602)])
    def test_tail_range_counts(self, m, n):
        fam = list(generate_family(FamilyKind.TAIL_RANGE, m))
        assert len(fam) == n
        assert all(check_ke(s).passes for s in fam)

    @pytest.mark.parametrize("m, n", [(4, 2), (5, 17), (6, 481)])
    def test_kervaire_counts(self, m, n):
        fam = list(generate_family("KervaireEven", m))
        assert len(fam) == n
        for s in fam:
            ok, crit = is_homotopy_sphere(build_graph(s))
            # m - 1 even entries form the even component; odd size only for even m
            assert ok is (m % 2 == 0)
            if ok:
                assert crit is Criterion.EVEN_COMPONENT_RULE

    def test_kervaire_example(self):
        fam = {s.a for s in generate_family(FamilyKind.KERVAIRE_EVEN, 6)}
        assert (2, 4, 6, 14, 86, 101) in fam
        assert classify(derive([2, 4, 6, 14, 86, 101])).link.kervaire is Kervaire.KERVAIRE_SPHERE

    def test_giant(self):
        (seq,) = generate_family(FamilyKind.MODULI_GIANT, 6)
        c = sylvester(5)
        assert seq.a == (2, 3, 7, 43, 1807, (c - 2) * c)
        assert check_ke(seq).passes

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            list(generate_family(FamilyKind.TAIL_RANGE, 3))

from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tstruct.errors import InputError
from tstruct.poset import PrimePoset, connected_components, enumerate_sp_subsets
from tstruct.rings import (
    NO, UNKNOWN, YES, AbstractPoset, DedekindMarked, PolyOverField, PolyQuotient,
    Product, ZmodN, connected_idempotents, crt_idempotents, fraction_ring_description,
    is_perfect, residue_field, spectrum,
)


def vee():
    return PrimePoset(["p1", "p2", "m"], [("p1", "m"), ("p2", "m")])


class TestSpectra:
    def test_zmod12(self):
        P = spectrum(ZmodN(12))
        assert P.elements == ("(2)", "(3)") and P.covers() == []

    def test_zmod8_is_a_point(self):
        assert spectrum(ZmodN(8)).elements == ("(2)",)

    def test_marked_integers(self):
        P = spectrum(DedekindMarked("Z", (2, 3)))
        assert P.elements == ("(0)", "(2)", "(3)")
        assert P.covers() == [("(0)", "(2)"), ("(0)", "(3)")]

    def test_polyquotient_antichain(self):
        P = spectrum(PolyQuotient("Q", (("x", 2), ("x-1", 1))))
        assert P.elements == ("(x)", "(x-1)") and P.covers() == []

    def test_product_is_disjoint_union(self):
        A, B = ZmodN(12), DedekindMarked("Z", (5,))
        P = spectrum(Product((A, B)))
        assert len(P) == len(spectrum(A)) + len(spectrum(B))
        assert len(connected_idempotents(Product((A, B)))) == 3
        assert len(connected_components(P)) == 3

    def test_abstract_is_declared_poset(self):
        assert spectrum(AbstractPoset(vee())) == vee()

    @pytest.mark.parametrize("bad", [
        lambda: ZmodN(1),
        lambda: DedekindMarked("Z", (4,)),
        lambda: DedekindMarked("Z", (2, 2)),
        lambda: PolyQuotient("Q", (("x^2-1", 1),)),
        lambda: PolyQuotient("F_4", (("x", 1),)),
        lambda: PolyQuotient("Q", ()),
        lambda: Product(()),
    ])
    def test_invalid_rings(self, bad):
        with pytest.raises(InputError):
            bad()


class TestIdempotents:
    def test_zmod12(self):
        # e = 1 mod 4 and 0 mod 3 lives on (2); e = 1 mod 3 and 0 mod 4 on (3)
        assert crt_idempotents(12) == {2: 9, 3: 4}
        got = dict(connected_idempotents(ZmodN(12)))
        assert got == {frozenset({"(2)"}): "9 mod 12", frozenset({"(3)"}): "4 mod 12"}

    def test_local_rings_are_connected(self):
        assert connected_idempotents(ZmodN(8)) == [(frozenset({"(2)"}), "1 mod 8")]
        assert len(connected_idempotents(DedekindMarked("Z", (2, 3)))) == 1

    @settings(max_examples=80, deadline=None)
    @given(st.integers(2, 5000))
    def test_crt_properties(self, n):
        es = crt_idempotents(n)
        assert sum(es.values()) % n == 1 % n
        for p, e in es.items():
            assert e * e % n == e
            a = sympy.multiplicity(p, n)
            assert e % p ** a == 1 % p ** a
        vals = list(es.values())
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                assert vals[i] * vals[j] % n == 0

    @pytest.mark.parametrize("field, factors", [
        ("Q", (("x", 2), ("x-1", 1))),
        ("F_3", (("x", 1), ("x+1", 2))),
        ("F_2", (("x", 1), ("x+1", 1), ("x^2+x+1", 1))),
    ])
    def test_polynomial_idempotents(self, field, factors):
        x = sympy.Symbol("x")
        mod = None if field == "Q" else int(field[2:])
        kw = {"domain": "QQ"} if mod is None else {"modulus": mod}

        def poly(text):
            return sympy.Poly(sympy.sympify(text.replace("^", "**")), x, **kw)

        f = poly("1")
        for g, e in factors:
            f = f * poly(g) ** e
        es = [poly(e) for _, e in connected_idempotents(PolyQuotient(field, factors))]
        total = poly("0")
        for e in es:
            assert (e * e - e).rem(f).is_zero
            total = total + e
        assert (total - poly("1")).rem(f).is_zero


class TestResidues:
    def test_examples(self):
        assert residue_field(ZmodN(12), "(2)") == "F_2"
        assert residue_field(DedekindMarked("Z", (2,)), "(0)") == "Q"
        assert residue_field(DedekindMarked("Z", (2,)), "(2)") == "F_2"
        assert residue_field(PolyQuotient("F_2", (("x^2+x+1", 1),)), "(x^2+x+1)") == "F_4"
        assert residue_field(PolyQuotient("Q", (("x^2+1", 1),)), "(x^2+1)") == "Q[x]/(x^2+1)"

    def test_defined_everywhere(self):
        rings = [ZmodN(360), DedekindMarked(PolyOverField("Q"), ("x", "x^2+1")),
                 Product((ZmodN(6), PolyQuotient("F_5", (("x", 3),))))]
        for R in rings:
            for p in spectrum(R):
                assert residue_field(R, p)

    def test_abstract_default(self):
        assert residue_field(AbstractPoset(vee()), "p1") == "k(p1)"

    def test_unknown_prime(self):
        with pytest.raises(InputError):
            residue_field(ZmodN(12), "(5)")


class TestPerfectness:
    def test_zmod12_single_prime(self):
        v = is_perfect(ZmodN(12), ["(3)"])
        assert v.status == YES and v.description.text == "Z/4"

    def test_zmod12_everything_is_zero_ring(self):
        d = fraction_ring_description(ZmodN(12), ["(2)", "(3)"])
        assert d.kind == "zero" and d.text == "0"

    def test_dedekind(self):
        v = is_perfect(DedekindMarked("Z", (2, 3)), ["(2)", "(3)"])
        assert v.status == YES and v.description.text == "Z[1/2, 1/3]"
        k = DedekindMarked(PolyOverField("Q"), ("x", "x^2+1"))
        assert is_perfect(k, ["(x)"]).description.text == "Q[x][1/(x)]"

    def test_empty_is_identity(self):
        d = fraction_ring_description(DedekindMarked("Z", (2,)), [])
        assert d.kind == "identity" and d.text == "Z"

    def test_reduced_minimal_rule(self):
        v = is_perfect(AbstractPoset(vee(), reduced=True), ["m"])
        assert v.status == YES
        assert v.description.kind == "residue_fields"
        assert v.description.text == "k(p1) x k(p2)"

    def test_abstract_unknown_and_declared(self):
        assert is_perfect(AbstractPoset(vee()), ["m"]).status == UNKNOWN
        assert is_perfect(AbstractPoset(vee(), perfect=(("m",),)), ["m"]).status == YES
        assert is_perfect(AbstractPoset(vee(), not_perfect=(("m",),)), ["m"]).status == NO

    def test_abstract_trivial_subsets(self):
        R = AbstractPoset(vee())
        assert is_perfect(R, []).status == YES
        assert is_perfect(R, ["p1", "p2", "m"]).status == YES

    def test_declaration_must_be_upset(self):
        with pytest.raises(InputError):
            AbstractPoset(vee(), perfect=(("p1",),))

    def test_conflicting_declarations(self):
        with pytest.raises(InputError):
            AbstractPoset(vee(), perfect=(("m",),), not_perfect=(("m",),))

    def test_non_upset_z(self):
        with pytest.raises(InputError):
            is_perfect(DedekindMarked("Z", (2,)), ["(0)"])

    @pytest.mark.parametrize("ring", [
        ZmodN(12), ZmodN(8), DedekindMarked("Z", (2, 3)),
        PolyQuotient("Q", (("x", 2), ("x-1", 1))),
        Product((ZmodN(6), DedekindMarked("Z", (7,)))),
    ])
    def test_whole_spectrum_is_zero_ring(self, ring):
        v = is_perfect(ring, spectrum(ring).elements)
        assert v.status == YES and v.description.kind == "zero"

    @pytest.mark.parametrize("ring", [ZmodN(360), PolyQuotient("F_2", (("x", 2), ("x+1", 1)))])
    def test_artinian_never_unknown(self, ring):
        for Z in enumerate_sp_subsets(spectrum(ring)):
            assert is_perfect(ring, Z).status == YES

    def test_product_combines(self):
        R = Product((ZmodN(12), AbstractPoset(vee())))
        assert spectrum(R).elements == ("f0.(2)", "f0.(3)", "f1.m", "f1.p1", "f1.p2")
        assert is_perfect(R, ["f1.m"]).status == UNKNOWN
        ok = is_perfect(R, ["f0.(2)"])
        assert ok.status == YES
        assert ok.description.factors[0][1] == "Z/3"

    def test_product_keeps_abstract_declarations(self):
        R = Product((ZmodN(12), AbstractPoset(vee(), perfect=(("m",),))))
        assert is_perfect(R, ["f1.m"]).status == YES

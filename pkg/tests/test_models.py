"""
Unit tests for Pydantic models
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from balanced.models import (
    BalanceCertificate,
    BalanceKind,
    Coalition,
    Collection,
    CoreReport,
    CountTable,
    LambdaClass,
    LambdaSet,
    MinimalCollection,
    TUGame,
    TwoElementCensus,
    VerifyDiff,
    VerifySuiteReport,
    ZeroOneMatrix,
)

HALF = Fraction(1, 2)


@pytest.mark.unit
class TestCoalitionAndMatrix:
    """Test cases for coalitions and 0-1 matrices"""

    def test_coalition_from_members(self):
        """Test building a coalition from 1-based members"""
        coalition = Coalition.from_members(3, [1, 3])
        assert coalition.mask == 0b101
        assert coalition.members() == [1, 3]

    def test_coalition_outside_players(self):
        """Test that a coalition must fit in [n]"""
        with pytest.raises(ValidationError):
            Coalition(n=2, mask=0b100)

    def test_empty_coalition(self):
        """Test that the empty coalition is rejected"""
        with pytest.raises(ValidationError):
            Coalition(n=2, mask=0)

    def test_matrix_rows(self):
        """Test the row view of a column-stored matrix"""
        M = ZeroOneMatrix(n=3, columns=(0b011, 0b110))
        assert M.m == 2
        assert M.rows() == (0b01, 0b11, 0b10)

    def test_matrix_payload(self):
        """Test matrix documents use 1-based member lists"""
        M = ZeroOneMatrix.from_payload({"n": 3, "columns": [[1, 2], [1, 3], [2, 3]]})
        assert M.columns == (0b011, 0b101, 0b110)
        assert M.to_payload() == {"n": 3, "columns": [[1, 2], [1, 3], [2, 3]]}


@pytest.mark.unit
class TestCollection:
    """Test cases for Collection model"""

    def test_canonical_order_required(self):
        """Test that raw sets must be strictly increasing"""
        with pytest.raises(ValidationError):
            Collection(n=3, sets=(0b110, 0b001))
        with pytest.raises(ValidationError):
            Collection(n=3, sets=(0b001, 0b001))

    def test_from_masks_canonicalizes(self):
        """Test sorting and deduplication"""
        c = Collection.from_masks(3, [0b110, 0b001, 0b110])
        assert c.sets == (0b001, 0b110)
        assert c.size == 2

    def test_covers_all(self):
        """Test the union check"""
        assert Collection.from_masks(3, [0b001, 0b110]).covers_all()
        assert not Collection.from_masks(3, [0b001, 0b010]).covers_all()

    def test_subcollection(self):
        """Test selecting members by index bits"""
        c = Collection.from_masks(3, [0b001, 0b010, 0b100])
        assert c.subcollection(0b101).sets == (0b001, 0b100)

    def test_key_and_payload(self):
        """Test key text and payload form"""
        c = Collection.from_payload({"n": 3, "sets": [[2, 3], [1]]})
        assert c.key() == "3:1,6"
        assert c.to_payload() == {"n": 3, "sets": [[1], [2, 3]]}


@pytest.mark.unit
class TestCertificates:
    """Test cases for balance certificates and weight classes"""

    def test_minimal_certificate_requires_positive_weights(self):
        """Test that a minimal certificate without weights is refused"""
        c = Collection.from_masks(2, [0b01, 0b10])
        with pytest.raises(ValidationError):
            BalanceCertificate(kind=BalanceKind.MINIMAL_BALANCED, collection=c)

    def test_certificate_weights_checked(self):
        """Test that weights must solve the system exactly"""
        c = Collection.from_masks(2, [0b01, 0b10])
        with pytest.raises(ValidationError):
            BalanceCertificate(kind=BalanceKind.MINIMAL_BALANCED, collection=c, weights=(1, HALF))

    def test_certificate_payload(self):
        """Test weights are written as p/q strings"""
        c = Collection.from_masks(3, [0b011, 0b101, 0b110])
        cert = BalanceCertificate(kind=BalanceKind.MINIMAL_BALANCED, collection=c, weights=("1/2", "1/2", "1/2"))
        payload = cert.to_payload()
        assert payload["kind"] == "minimal-balanced"
        assert payload["weights"] == ["1/2", "1/2", "1/2"]
        assert payload["witness"] is None

    def test_rational_rejects_float(self):
        """Test that float weights are never accepted"""
        with pytest.raises(ValidationError):
            MinimalCollection(collection=Collection.from_masks(1, [1]), weights=(1.0,))

    def test_lambda_class(self):
        """Test canonical weight classes"""
        cls_ = LambdaClass.from_vector((Fraction(1, 3), Fraction(2, 3), Fraction(1, 3), Fraction(1, 3)))
        assert cls_.vector == (Fraction(2, 3), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
        assert cls_.multiplicity == 4
        with pytest.raises(ValidationError):
            LambdaClass(vector=(HALF, Fraction(1)), multiplicity=2)
        with pytest.raises(ValidationError):
            LambdaClass(vector=(Fraction(1), HALF), multiplicity=1)

    def test_lambda_set(self):
        """Test deduplication of permuted vectors"""
        lam = LambdaSet.from_vectors(2, [(1, 1), (Fraction(1), Fraction(1))])
        assert len(lam.classes) == 1
        assert lam.total_vectors == 1
        with pytest.raises(ValidationError):
            LambdaSet(m=3, classes=(LambdaClass.from_vector((Fraction(1), Fraction(1))),))

    def test_lambda_set_json(self):
        """Test JSON dump writes weights as strings"""
        lam = LambdaSet.from_vectors(3, [(HALF, HALF, HALF)])
        assert lam.model_dump(mode="json")["classes"][0]["vector"] == ["1/2", "1/2", "1/2"]


@pytest.mark.unit
class TestReports:
    """Test cases for count, census, game and verification models"""

    def test_count_table_total(self):
        """Test that totals must add up"""
        assert CountTable(n=3, per_m=(1, 3, 2), total=6).total == 6
        with pytest.raises(ValidationError):
            CountTable(n=3, per_m=(1, 3, 2), total=7)
        with pytest.raises(ValidationError):
            CountTable(n=3, per_m=(1, 3), total=4)

    def test_two_element_total(self):
        """Test census totals"""
        with pytest.raises(ValidationError):
            TwoElementCensus(n=5, by_shape={"5": 12}, total=22)

    def test_game_shape(self):
        """Test worth vector length and empty-coalition worth"""
        game = TUGame(n=2, v=("0", "0", "0", "1"))
        assert game.grand_worth == 1
        assert game.worth(0b01) == 0
        with pytest.raises(ValidationError):
            TUGame(n=2, v=("0", "0", "1"))
        with pytest.raises(ValidationError):
            TUGame(n=1, v=("1", "1"))

    def test_core_report_single_witness(self):
        """Test that a core report carries exactly one witness"""
        with pytest.raises(ValidationError):
            CoreReport(nonempty=True, method="lp")
        with pytest.raises(ValidationError):
            CoreReport(nonempty=False, method="lp", allocation=(1,))
        report = CoreReport(nonempty=True, method="lp", allocation=("1/2",), slack=0)
        assert report.to_payload()["allocation"] == ["1/2"]

    def test_suite_report_caps_diffs(self):
        """Test that long diff lists are truncated"""
        diffs = [VerifyDiff(key=str(i), expected="a", computed="b") for i in range(250)]
        report = VerifySuiteReport(name="tables", scope=3, passed=False, checked=250, diffs=diffs)
        assert len(report.diffs) == 200

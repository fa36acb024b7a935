"""Background-knowledge constraints: tiers, forbidden/required edges, validation."""

import numpy as np
import pytest

from caussearch.errors import KnowledgeError
from caussearch.knowledge import Knowledge, validate_or_raise

from conftest import continuous_dataset


def dataset(*names):
    return continuous_dataset({n: np.zeros(3) for n in names})


def test_tiers_and_membership():
    k = Knowledge().add_to_tier(0, "A").add_to_tier(2, "B")
    assert k.tier_of("A") == 0
    assert k.tier_of("B") == 2
    assert k.tier_of("C") is None
    assert len(k.tiers) == 3 and k.tiers[1] == []


def test_add_to_tier_idempotent():
    k = Knowledge().add_to_tier(1, "A").add_to_tier(1, "A")
    assert k.tiers[1] == ["A"]


def test_same_name_two_tiers_rejected():
    k = Knowledge().add_to_tier(0, "A")
    with pytest.raises(KnowledgeError, match="A"):
        k.add_to_tier(1, "A")


def test_tier_ordering_forbids_backward_edges():
    k = Knowledge().add_to_tier(0, "A").add_to_tier(1, "B")
    assert k.is_forbidden("B", "A")
    assert not k.is_forbidden("A", "B")
    assert not k.forbidden_both_ways("A", "B")


def test_within_tier_flag():
    k = Knowledge().add_to_tier(0, "A").add_to_tier(0, "B")
    assert not k.is_forbidden("A", "B")
    k = k.set_tier_forbidden_within(0, True)
    assert k.is_forbidden("A", "B")
    assert k.is_forbidden("B", "A")
    assert k.forbidden_both_ways("A", "B")
    k = k.set_tier_forbidden_within(0, False)
    assert not k.is_forbidden("A", "B")


def test_explicit_forbidden_is_directional():
    k = Knowledge().forbid("A", "B")
    assert k.is_forbidden("A", "B")
    assert not k.is_forbidden("B", "A")


def test_required_masks_forbidden_in_queries():
    # conflicting constraints surface in validate(), not in is_forbidden
    k = Knowledge().forbid("A", "B").require("A", "B")
    assert not k.is_forbidden("A", "B")
    problems = k.validate(dataset("A", "B"))
    assert any("both required and forbidden" in p for p in problems)


def test_untiered_names_unconstrained():
    k = Knowledge().add_to_tier(0, "A")
    assert not k.is_forbidden("A", "Z")
    assert not k.is_forbidden("Z", "A")


def test_validate_clean():
    k = Knowledge().add_to_tier(0, "A").add_to_tier(1, "B").require("A", "B")
    assert k.validate(dataset("A", "B")) == []


def test_validate_unknown_name():
    k = Knowledge().forbid("A", "Typo")
    problems = k.validate(dataset("A", "B"))
    assert any("Typo" in p for p in problems)


def test_validate_required_against_tiers():
    k = Knowledge().add_to_tier(0, "A").add_to_tier(1, "B").require("B", "A")
    problems = k.validate(dataset("A", "B"))
    assert any("earlier tier" in p for p in problems)


def test_validate_required_within_closed_tier():
    k = (Knowledge().add_to_tier(0, "A").add_to_tier(0, "B")
         .set_tier_forbidden_within(0, True).require("A", "B"))
    problems = k.validate(dataset("A", "B"))
    assert any("within tier" in p for p in problems)


def test_validate_required_cycle():
    k = Knowledge().require("A", "B").require("B", "C").require("C", "A")
    problems = k.validate(dataset("A", "B", "C"))
    assert any("cycle" in p for p in problems)


def test_validate_or_raise():
    k = Knowledge().forbid("A", "Typo")
    with pytest.raises(KnowledgeError, match="Typo"):
        validate_or_raise(k, dataset("A", "B"))
    validate_or_raise(None, dataset("A"))
    validate_or_raise(Knowledge(), dataset("A"))


def test_is_empty():
    assert Knowledge().is_empty()
    assert not Knowledge().forbid("A", "B").is_empty()
    assert not Knowledge().add_to_tier(0, "A").is_empty()

from regcut.families import filter_protocol, running
from regcut.symbolic import Sign
from regcut.tight import tight_search


def test_filter_two_certified():
    r = tight_search(filter_protocol(2), k_max=7)
    assert (r.sign, r.cutoff, r.certified) == (Sign.POSITIVE, 2, True)
    assert [e.answer for e in r.entries[:2]] == ["NotAlmostSure", "AlmostSure"]


def test_short_scan_is_empirical():
    r = tight_search(filter_protocol(3), k_max=6)
    assert (r.sign, r.cutoff) == (Sign.POSITIVE, 3)
    assert not r.certified


def test_running_negative_from_one():
    r = tight_search(running(), k_max=4)
    assert (r.sign, r.cutoff) == (Sign.NEGATIVE, 1)
    assert all(e.answer == "NotAlmostSure" for e in r.entries)


def test_without_certificate():
    r = tight_search(filter_protocol(2), k_max=4, certify=False)
    assert r.verdict is None and not r.certified and r.cutoff == 2
    doc = r.to_dict()
    assert doc["certificate"] is None and doc["tight_cutoff"] == 2

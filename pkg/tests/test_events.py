"""Parsing, indexing, and counting of interaction logs."""

from __future__ import annotations

import numpy as np
import pytest

from coglink import EventLog, from_triples, ingest, stats
from coglink.events import Event


def write(tmp_path, text, name="log.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_single_line(tmp_path):
    log = ingest(write(tmp_path, "a b 5\n"))
    assert log.n_events == 1
    assert log.n_nodes == 2
    assert log.span == (5, 5)
    assert list(log.events()) == [Event(0, 1, 5)]


def test_self_loops_dropped_and_counted(tmp_path):
    log = ingest(write(tmp_path, "a a 1\na b 2\n"))
    assert log.n_events == 1
    assert log.dropped_self_loops == 1
    assert stats(log).events == 1


def test_directed_records_fold_to_one_pair(tmp_path):
    log = ingest(write(tmp_path, "a b 1\nb a 2\n"))
    s = stats(log)
    assert s.edges == 1
    assert s.events == 2


def test_sorted_with_stable_ties(tmp_path):
    log = ingest(write(tmp_path, "c d 9\na b 5\nx y 5\n"))
    assert log.t.tolist() == [5, 5, 9]
    # equal timestamps keep file order: a-b line precedes x-y line
    assert log.labels[:2] == ("a", "b")
    assert log.labels[2:4] == ("x", "y")


def test_dense_ids_follow_time_order(tmp_path):
    # first event in time is c-d, so c gets id 0 despite appearing later in the file
    log = ingest(write(tmp_path, "a b 10\nc d 1\n"))
    assert log.labels == ("c", "d", "a", "b")


def test_comments_and_blanks_skipped(tmp_path):
    log = ingest(write(tmp_path, "# header\n\na b 1\n# trailing\n"))
    assert log.n_events == 1


def test_csv_and_auto_formats(tmp_path):
    path = write(tmp_path, "a,b,3\nb,c,4\n")
    assert ingest(path, "csv").n_events == 2
    assert ingest(path, "auto").n_events == 2
    assert ingest(write(tmp_path, "a b 3\n", name="ws.txt"), "auto").n_events == 1


def test_field_count_error_has_line_number(tmp_path):
    with pytest.raises(ValueError, match="line 2"):
        ingest(write(tmp_path, "a b 1\na b\n"))


def test_bad_timestamp_error(tmp_path):
    with pytest.raises(ValueError, match="not an integer"):
        ingest(write(tmp_path, "a b xyz\n"))


def test_empty_file_is_an_error(tmp_path):
    with pytest.raises(ValueError, match="no events"):
        ingest(write(tmp_path, "# nothing\n"))


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError, match="format"):
        ingest(write(tmp_path, "a b 1\n"), "tsv")


def test_stats_counts_distinct_timestamps():
    log = from_triples([(0, 1, 1), (0, 1, 1), (1, 2, 2)])
    s = stats(log)
    assert (s.nodes, s.edges, s.events, s.timestamps) == (3, 2, 3, 2)


def test_roundtrip_is_idempotent(tmp_path):
    rng = np.random.default_rng(3)
    triples = [
        (int(rng.integers(0, 12)), int(rng.integers(0, 12)), int(rng.integers(0, 5000)))
        for _ in range(200)
    ]
    log = from_triples(triples)
    path = tmp_path / "round.txt"
    log.save(path)
    again = ingest(path)
    assert again.labels == log.labels
    assert np.array_equal(again.u, log.u)
    assert np.array_equal(again.v, log.v)
    assert np.array_equal(again.t, log.t)
    assert stats(again) == stats(log)


def test_line_permutation_preserves_multiset(tmp_path):
    text = "a b 3\nc d 1\nb c 2\na b 1\n"
    shuffled = "a b 1\nb c 2\nc d 1\na b 3\n"
    s1 = stats(ingest(write(tmp_path, text, name="one.txt")))
    s2 = stats(ingest(write(tmp_path, shuffled, name="two.txt")))
    assert s1 == s2


def test_subset_keeps_node_universe():
    log = from_triples([(0, 1, 1), (1, 2, 2), (2, 3, 3)])
    sub = log.subset(np.array([True, False, True]))
    assert sub.n_nodes == log.n_nodes
    assert sub.n_events == 2
    assert sub.active_nodes().tolist() == [0, 1, 2, 3]


def test_pair_codes_canonical():
    log = from_triples([(5, 2, 1), (2, 5, 2)])
    codes = log.pair_codes()
    assert codes[0] == codes[1]
    assert (log.u < log.v).all()


def test_arrays_frozen():
    log = from_triples([(0, 1, 1)])
    with pytest.raises(ValueError):
        log.t[0] = 99

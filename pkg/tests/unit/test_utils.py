import threading
from unittest.mock import patch

import pytest

from hyperarousal.logger import Logger
from hyperarousal.utils import atomic_write, derive_seed, parallel_map, resolve_threads, rng_for
from hyperarousal.utils.performance_profiler import (
    Timer,
    disable_timing_analysis,
    enable_timing_analysis,
    get_global_stats,
    timed,
)


def test_derive_seed_is_stable_and_name_sensitive():
    """Test that sub-seeds depend on the full name path and nothing else."""
    assert derive_seed(7, "train", "gradient_boost") == derive_seed(7, "train", "gradient_boost")
    assert derive_seed(7, "train", "gradient_boost") != derive_seed(7, "train", "rbf_svm")
    assert derive_seed(7, "split") != derive_seed(8, "split")
    assert 0 <= derive_seed(123, "x") < 2**63
    assert rng_for(1, "a").random() == rng_for(1, "a").random()


def test_parallel_map_keeps_input_order():
    """Test that results come back in input order for any worker count."""
    items = list(range(50))
    expected = [i * i for i in items]
    assert parallel_map(lambda i: i * i, items, threads=1) == expected
    assert parallel_map(lambda i: i * i, items, threads=8) == expected
    assert parallel_map(lambda i: i, [], threads=4) == []


def test_single_worker_runs_inline():
    names = set()

    def record(_):
        names.add(threading.current_thread().name)
        return None

    parallel_map(record, range(4), threads=1)
    assert names == {threading.current_thread().name}


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("HYPERAROUSAL_THREADS", raising=False)
    assert resolve_threads() == 1
    assert resolve_threads(0) == 1
    monkeypatch.setenv("HYPERAROUSAL_THREADS", "6")
    assert resolve_threads() == 6
    assert resolve_threads(2) == 2
    monkeypatch.setenv("HYPERAROUSAL_THREADS", "many")
    assert resolve_threads() == 1


def test_atomic_write_replaces_on_success(tmp_path):
    path = tmp_path / "nested" / "out.csv"
    with atomic_write(path) as handle:
        handle.write("a,b\n")
    assert path.read_text() == "a,b\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.csv"]


def test_atomic_write_keeps_previous_content_on_error(tmp_path):
    """Test that a failed write leaves neither a partial file nor a temporary."""
    path = tmp_path / "out.csv"
    path.write_text("old\n")
    with pytest.raises(RuntimeError):
        with atomic_write(path) as handle:
            handle.write("partial")
            raise RuntimeError("boom")
    assert path.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_timer_records_only_when_enabled():
    stats = get_global_stats()
    stats.reset()
    with Timer("test/disabled"):
        pass
    assert stats.get_stats("test/disabled") is None

    enable_timing_analysis()
    try:
        with patch.object(Logger, "print_perf") as mock_perf:
            with Timer("test/enabled"):
                pass

            @timed("test/decorated")
            def add(a, b):
                return a + b

            assert add(2, 3) == 5
        assert stats.get_stats("test/enabled")["count"] == 1
        assert stats.get_stats("test/decorated")["count"] == 1
        assert any("test/enabled" in str(call) for call in mock_perf.call_args_list)
    finally:
        disable_timing_analysis()
        stats.reset()


def test_debug_messages_follow_the_switch(capsys):
    """Test that print_debug is silent until debug logging is enabled."""
    was_enabled = Logger.is_debug_enabled()
    try:
        Logger.disable_debug()
        Logger.print_debug("hidden detail")
        assert "hidden detail" not in capsys.readouterr().err

        Logger.enable_debug()
        Logger.print_debug("shown detail")
        Logger.print_warning("a warning")
        err = capsys.readouterr().err
        assert "shown detail" in err
        assert "a warning" in err
    finally:
        if was_enabled:
            Logger.enable_debug()
        else:
            Logger.disable_debug()

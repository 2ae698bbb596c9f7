import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremegaps.errors import ValidationError
from extremegaps.zeta import (
    BUNDLED_COUNT,
    ZetaZeroSeries,
    bundled_zeros_path,
    load_zeros,
    max_gap_report,
    normalized_gaps,
    predicted_max_gap,
    save_zeros,
    small_gap_histogram,
    small_gap_reference,
)

FIRST = [14.134725141734693, 21.022039638771555, 25.010857580145688, 30.424876125859513, 32.935061587739189]

needs_fixture = pytest.mark.skipif(not bundled_zeros_path().exists(), reason="bundled zero table missing")


def write(tmp_path, text, name="zeros.txt"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_three_zero_file(tmp_path):
    p = write(tmp_path, "# header\n14.134725142\n\n21.022039639\n25.010857580\n")
    z = load_zeros(p)
    assert len(z) == 3 and z.source == str(p)
    g = normalized_gaps(z)
    expected = np.diff(z.ordinates) / (2 * np.pi) * np.log(z.ordinates[:2] / (2 * np.pi))
    assert np.array_equal(g, expected)


def test_offset_and_count(tmp_path):
    p = write(tmp_path, "\n".join(map(repr, FIRST)) + "\n")
    z = load_zeros(p, offset=1, count=3)
    assert np.array_equal(z.ordinates, FIRST[1:4]) and z.offset == 1
    with pytest.raises(ValidationError, match="only 2"):
        load_zeros(p, offset=3, count=3)
    with pytest.raises(ValidationError):
        load_zeros(p, offset=5)
    with pytest.raises(ValidationError):
        load_zeros(p, offset=-1)


def test_empty_file(tmp_path):
    with pytest.raises(ValidationError):
        load_zeros(write(tmp_path, "# nothing here\n\n"))


def test_parse_error_reports_line(tmp_path):
    p = write(tmp_path, "# h\n14.13\n21.02\nabc\n")
    with pytest.raises(ValidationError, match=r"zeros\.txt:4"):
        load_zeros(p)
    with pytest.raises(ValidationError, match=r":3: non-finite"):
        load_zeros(write(tmp_path, "14.13\n21.02\nnan\n"))


def test_non_increasing_rejected_even_before_offset(tmp_path):
    p = write(tmp_path, "14.13\n21.02\n20.0\n25.01\n")
    with pytest.raises(ValidationError, match=":3:"):
        load_zeros(p, offset=3)


def test_series_validation_and_slicing():
    z = ZetaZeroSeries(np.array(FIRST), "mem")
    s = z[1:4]
    assert s.offset == 1 and len(s) == 3
    assert s[1:].offset == 2
    with pytest.raises(TypeError):
        z[::2]
    with pytest.raises(ValidationError):
        ZetaZeroSeries(np.array([0.5, 2.0]))
    with pytest.raises(ValidationError, match="index 2"):
        ZetaZeroSeries(np.array([14.0, 15.0, 15.0]))


def test_round_trip(tmp_path):
    z = ZetaZeroSeries(np.array(FIRST), "mem")
    p = tmp_path / "out.txt"
    save_zeros(z, p, header="five zeros\nfull precision")
    back = load_zeros(p)
    assert np.array_equal(back.ordinates, z.ordinates)
    assert p.read_text().startswith("# five zeros\n# full precision\n")


def test_unit_normalized_gap():
    gamma = 1000.0
    step = 2 * np.pi / np.log(gamma / (2 * np.pi))
    assert normalized_gaps([gamma, gamma + step])[0] == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValidationError):
        normalized_gaps([gamma])


def test_predictions():
    assert predicted_max_gap(2e9) == pytest.approx(4.166, abs=5e-4)
    assert small_gap_reference(3.0, 5.0) == pytest.approx(5 * 9 / (24 * np.pi))
    with pytest.raises(ValidationError):
        predicted_max_gap(1)


def test_max_gap_report_index():
    z = ZetaZeroSeries(np.array(FIRST), "mem", offset=10)
    rep = max_gap_report(z)
    g = normalized_gaps(z)
    assert rep.observed == g.max() and rep.n == 4
    assert rep.index == 10 + int(np.argmax(g)) + 1
    assert rep.relative_difference == pytest.approx(g.max() / predicted_max_gap(4) - 1)
    with pytest.raises(ValidationError):
        max_gap_report(z, n=5)


def test_histogram_mass_and_expected():
    gen = np.random.default_rng(0)
    z = ZetaZeroSeries(100 + np.cumsum(gen.exponential(0.5, 3000)))
    h = small_gap_histogram(z, count=400, bin_width=0.5)
    assert h.counts.sum() == 400
    assert h.edges[0] == 0 and h.edges[-1] > h.values[-1] >= h.edges[-2]
    assert np.allclose(h.expected.sum(), h.edges[-1] ** 3 / (72 * np.pi))
    assert not h.complete_bins()[-1]
    with pytest.raises(ValidationError):
        small_gap_histogram(z, count=0)
    with pytest.raises(ValidationError):
        small_gap_histogram(z, bin_width=0)


@needs_fixture
def test_bundled_fixture():
    z = load_zeros(bundled_zeros_path())
    assert len(z) == BUNDLED_COUNT
    assert np.allclose(z.ordinates[:5], FIRST, atol=1e-8)
    g = normalized_gaps(z)
    assert abs(g.mean() - 1) < 0.01
    rep = max_gap_report(z)
    assert 0.7 < rep.observed / rep.predicted < 1.1
    h = small_gap_histogram(z)
    assert h.counts.sum() == 1000
    assert abs(h.loglog_slope() - 2) < 0.3


@needs_fixture
def test_bundled_fixture_partial_load():
    z = load_zeros(bundled_zeros_path(), offset=99_990)
    assert len(z) == 10 and z.offset == 99_990
    # the 100000th zero
    assert z.ordinates[-1] == pytest.approx(74920.827498994, abs=1e-6)


@pytest.mark.skipif("EXTREMEGAPS_ZEROS_FILE" not in os.environ, reason="set EXTREMEGAPS_ZEROS_FILE to an Odlyzko table")
def test_external_table():
    z = load_zeros(os.environ["EXTREMEGAPS_ZEROS_FILE"], count=100_000)
    assert abs(normalized_gaps(z).mean() - 1) < 0.01


@settings(max_examples=40, deadline=None)
@given(
    start=st.floats(20, 1e6),
    steps=st.lists(st.floats(1e-3, 5.0), min_size=2, max_size=40),
)
def test_normalized_gaps_positive_and_scale(start, steps):
    g = np.concatenate([[start], start + np.cumsum(steps)])
    ng = normalized_gaps(g)
    assert np.all(ng > 0)
    assert np.allclose(ng * 2 * np.pi / np.log(g[:-1] / (2 * np.pi)), np.diff(g))

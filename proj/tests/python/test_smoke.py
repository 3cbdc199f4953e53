import math

import pytest

import moskit


def make_tone(clip_id, seconds=1.0, freq=440.0, amplitude=0.25, sample_rate=16000):
    clip = moskit.Clip()
    clip.clip_id = clip_id
    clip.sample_rate = sample_rate
    n = int(seconds * sample_rate)
    clip.samples = [
        amplitude * math.sin(2.0 * math.pi * freq * i / sample_rate) for i in range(n)
    ]
    return clip


def test_metric_fixtures():
    assert moskit.rmse([3.0, 3.0], [4.0, 4.0]) == math.sqrt(2.0)
    assert moskit.pcc([1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0]) == pytest.approx(1.0)
    assert moskit.perror([3.0, 4.0], [2.5, 4.5]) == [0.5, -0.5]
    assert moskit.outlier_ratio([3.0, 3.0], [0.1, 1.0], [3.5, 3.5]) == 0.5
    with pytest.raises(ValueError):
        moskit.rmse([1.0], [1.0])


def test_aggregation_matches_closed_form_ci():
    labels, excluded, duplicates = moskit.aggregate_ratings(
        [("a", "r1", 1.0), ("a", "r2", 5.0)], 1
    )
    assert excluded == [] and duplicates == 0
    assert len(labels) == 1
    assert labels[0].mos == pytest.approx(3.0)
    assert labels[0].n_ratings == 2
    assert labels[0].ci95 == pytest.approx(2.0 * math.tan(0.475 * math.pi), rel=1e-12)


def test_mapping_repairs_affine_bias():
    y = [1.0, 1.5, 2.5, 3.1, 3.8, 4.6]
    x = [1.2, 1.7, 2.4, 3.0, 3.9, 4.5]
    fit = moskit.fit_monotone_cubic(x, y)
    assert fit.monotone_on_grid()
    assert fit.range_lo == 1.0 and fit.range_hi == 4.6

    biased = [2.0 * v - 3.0 for v in y]
    mapped, _ = moskit.rmse_map(x, biased)
    base, _ = moskit.rmse_map(x, y)
    assert mapped == pytest.approx(base, abs=1e-4)
    assert mapped <= moskit.rmse(x, biased) + 1e-6


def test_audio_round_trip(tmp_path):
    clip = make_tone("tone")
    path = str(tmp_path / "tone.wav")
    moskit.save_audio(clip, path)
    loaded = moskit.load_audio(path)
    assert loaded.clip_id == "tone"
    assert loaded.sample_rate == 16000
    assert len(loaded.samples) == len(clip.samples)
    worst = max(abs(a - b) for a, b in zip(loaded.samples, clip.samples))
    assert worst <= 1.0 / 32768.0

    with pytest.raises(OSError):
        moskit.load_audio(str(tmp_path / "missing.wav"))


def test_white_noise_hits_target_snr():
    clip = make_tone("snr", amplitude=0.1)
    out = moskit.add_white_noise(clip, 20.0, 7)
    noise = [o - s for o, s in zip(out.samples, clip.samples)]
    snr = 10.0 * math.log10(
        moskit.signal_power(clip.samples) / moskit.signal_power(noise)
    )
    assert snr == pytest.approx(20.0, abs=0.1)


def test_segmentation_drops_the_remainder():
    clip = make_tone("long", seconds=25.0)
    segments = moskit.segment_speech(clip, 10.0, 0.5)
    assert [s.clip_id for s in segments] == ["long_seg000", "long_seg001"]
    assert all(len(s.samples) == 160000 for s in segments)

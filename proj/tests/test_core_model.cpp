#include "moskit/audio_io.hpp"
#include "moskit/config.hpp"
#include "moskit/csv.hpp"
#include "moskit/errors.hpp"
#include "moskit/manifest.hpp"
#include "moskit/rng.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>

using namespace moskit;
using testutil::TempDir;

namespace {

const char* kManifestText =
    "clip_id,dataset,audio_path,mos,ci95,n_ratings,condition\n"
    "c1,tencent,audio/c1.wav,3.5,0.12,30,clean\n"
    "c2,tencent,audio/c2.wav,1.25,0.4,24,white_noise\n"
    "c3,tencent,,4.875,0,28,\n";

// Little-endian raw WAV writer so load_audio is tested against bytes not
// produced by save_audio.
void put_u32(std::string& s, uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& s, uint16_t v) {
    for (int i = 0; i < 2; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string raw_wav(uint16_t format, uint16_t channels, uint32_t rate, uint16_t bits,
                    const std::vector<int16_t>& frames) {
    std::string data;
    for (int16_t v : frames) put_u16(data, static_cast<uint16_t>(v));
    std::string fmt;
    put_u16(fmt, format);
    put_u16(fmt, channels);
    put_u32(fmt, rate);
    put_u32(fmt, rate * channels * bits / 8);
    put_u16(fmt, static_cast<uint16_t>(channels * bits / 8));
    put_u16(fmt, bits);

    std::string out = "RIFF";
    put_u32(out, static_cast<uint32_t>(4 + 8 + fmt.size() + 8 + data.size()));
    out += "WAVEfmt ";
    put_u32(out, static_cast<uint32_t>(fmt.size()));
    out += fmt;
    out += "data";
    put_u32(out, static_cast<uint32_t>(data.size()));
    out += data;
    return out;
}

} // namespace

TEST_CASE("csv parser handles quoting and reports bad quotes") {
    const auto rows = csv::parse("a,\"b,c\",d\r\n\"x\"\"y\",,z\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b,c", "d"});
    CHECK(rows[1].fields == std::vector<std::string>{"x\"y", "", "z"});
    CHECK(rows[1].line == 2);
    CHECK_THROWS_AS((void)csv::parse("\"unterminated\n"), ValidationError);
}

TEST_CASE("format_double round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 12345.6789, -2.5e-7, 4.0}) {
        CHECK(std::stod(csv::format_double(v)) == v);
    }
}

TEST_CASE("manifest loads, validates, and round-trips") {
    TempDir tmp;
    const std::string path = tmp.file("m.csv");
    testutil::write_text(path, kManifestText);

    const DatasetManifest m = load_manifest(path);
    REQUIRE(m.rows.size() == 3);
    CHECK(m.dataset == "tencent");
    CHECK(m.rows[0].clip_id == "c1");
    CHECK(m.rows[0].mos == 3.5);
    CHECK(m.rows[0].n_ratings == 30);
    CHECK(m.rows[2].audio_path.empty());
    CHECK(m.rows[2].rated());

    const std::string copy = tmp.file("copy.csv");
    save_manifest(m, copy);
    const DatasetManifest again = load_manifest(copy);
    REQUIRE(again.rows.size() == m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        CHECK(again.rows[i].clip_id == m.rows[i].clip_id);
        CHECK(again.rows[i].dataset == m.rows[i].dataset);
        CHECK(again.rows[i].audio_path == m.rows[i].audio_path);
        CHECK(again.rows[i].mos == m.rows[i].mos);
        CHECK(again.rows[i].ci95 == m.rows[i].ci95);
        CHECK(again.rows[i].n_ratings == m.rows[i].n_ratings);
        CHECK(again.rows[i].condition == m.rows[i].condition);
    }
}

TEST_CASE("manifest errors name the offence") {
    TempDir tmp;

    SUBCASE("duplicate clip_id") {
        testutil::write_text(tmp.file("m.csv"),
                             "clip_id,dataset,audio_path,mos,ci95,n_ratings,condition\n"
                             "c1,d,,3,0.1,20,\n"
                             "c1,d,,4,0.1,20,\n");
        CHECK_THROWS_WITH_AS((void)load_manifest(tmp.file("m.csv")),
                             doctest::Contains("c1"), ValidationError);
    }
    SUBCASE("mos out of range") {
        testutil::write_text(tmp.file("m.csv"),
                             "clip_id,dataset,audio_path,mos,ci95,n_ratings,condition\n"
                             "c1,d,,5.7,0.1,20,\n");
        CHECK_THROWS_WITH_AS((void)load_manifest(tmp.file("m.csv")),
                             doctest::Contains("mos"), ValidationError);
    }
    SUBCASE("malformed row names line and column") {
        testutil::write_text(tmp.file("m.csv"),
                             "clip_id,dataset,audio_path,mos,ci95,n_ratings,condition\n"
                             "c1,d,,3.0,0.1,not_a_number,\n");
        CHECK_THROWS_WITH_AS((void)load_manifest(tmp.file("m.csv")), doctest::Contains(":2:"),
                             ValidationError);
    }
    SUBCASE("unrated row loads with empty label fields") {
        testutil::write_text(tmp.file("m.csv"),
                             "clip_id,dataset,audio_path,mos,ci95,n_ratings,condition\n"
                             "c1,d,a.wav,,,,white_noise\n");
        const DatasetManifest m = load_manifest(tmp.file("m.csv"));
        REQUIRE(m.rows.size() == 1);
        CHECK_FALSE(m.rows[0].rated());
        CHECK(std::isnan(m.rows[0].mos));
    }
}

TEST_CASE("ratings and predictions files parse and validate") {
    TempDir tmp;
    testutil::write_text(tmp.file("r.csv"), "clip_id,rater_id,rating\nc1,u1,4\nc1,u2,3.5\n");
    const auto records = load_ratings(tmp.file("r.csv"));
    REQUIRE(records.size() == 2);
    CHECK(records[1].rating == 3.5);

    testutil::write_text(tmp.file("bad.csv"), "clip_id,rater_id,rating\nc1,u1,7\n");
    CHECK_THROWS_AS((void)load_ratings(tmp.file("bad.csv")), ValidationError);

    testutil::write_text(tmp.file("preds.csv"), "clip_id,score\nc1,3.2\nc2,4.9\n");
    const PredictionSet set = load_predictions(tmp.file("preds.csv"));
    CHECK(set.model_id == "preds");
    CHECK(set.entries.at("c2") == 4.9);

    testutil::write_text(tmp.file("dup.csv"), "clip_id,score\nc1,3.2\nc1,3.3\n");
    CHECK_THROWS_WITH_AS((void)load_predictions(tmp.file("dup.csv")), doctest::Contains("c1"),
                         ValidationError);
}

TEST_CASE("wav loading follows the 16-bit contract") {
    TempDir tmp;

    SUBCASE("mono scaling") {
        testutil::write_text(tmp.file("a.wav"), raw_wav(1, 1, 16000, 16, {0, 16384, -32768}));
        const Clip clip = load_audio(tmp.file("a.wav"));
        CHECK(clip.sample_rate == 16000);
        REQUIRE(clip.samples.size() == 3);
        CHECK(clip.samples[0] == 0.0);
        CHECK(clip.samples[1] == 0.5);
        CHECK(clip.samples[2] == -1.0);
    }
    SUBCASE("stereo averages channels") {
        testutil::write_text(tmp.file("s.wav"), raw_wav(1, 2, 8000, 16, {32767, 0, -16384, 16384}));
        const Clip clip = load_audio(tmp.file("s.wav"));
        REQUIRE(clip.samples.size() == 2);
        CHECK(clip.samples[0] == doctest::Approx(32767.0 / 65536.0));
        CHECK(clip.samples[1] == 0.0);
    }
    SUBCASE("24-bit rejected by name") {
        testutil::write_text(tmp.file("b.wav"), raw_wav(1, 1, 16000, 24, {0, 0, 0}));
        CHECK_THROWS_WITH_AS((void)load_audio(tmp.file("b.wav")), doctest::Contains("24"),
                             ValidationError);
    }
    SUBCASE("float wav rejected by encoding name") {
        testutil::write_text(tmp.file("f.wav"), raw_wav(3, 1, 16000, 32, {0, 0}));
        CHECK_THROWS_AS((void)load_audio(tmp.file("f.wav")), ValidationError);
    }
    SUBCASE("truncated data chunk") {
        std::string bytes = raw_wav(1, 1, 16000, 16, {1, 2, 3, 4});
        bytes.resize(bytes.size() - 3);
        testutil::write_text(tmp.file("t.wav"), bytes);
        CHECK_THROWS_AS((void)load_audio(tmp.file("t.wav")), ValidationError);
    }
}

TEST_CASE("wav save clamps, quantizes, and round-trips within one step") {
    TempDir tmp;

    Clip clip;
    clip.clip_id = "x";
    clip.sample_rate = 16000;
    clip.samples = {0.0, 0.5, 1.5, -2.0};
    save_audio(clip, tmp.file("x.wav"));
    const Clip back = load_audio(tmp.file("x.wav"));
    CHECK(back.samples[0] == 0.0);
    CHECK(back.samples[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(back.samples[2] == doctest::Approx(1.0 - 1.0 / 32768.0));
    CHECK(back.samples[3] == -1.0);

    Prng rng(42);
    Clip noise;
    noise.clip_id = "n";
    noise.sample_rate = 8000;
    for (int i = 0; i < 4000; ++i) noise.samples.push_back(rng.uniform(-1.0, 1.0));
    save_audio(noise, tmp.file("n.wav"));
    const Clip noise_back = load_audio(tmp.file("n.wav"));
    REQUIRE(noise_back.samples.size() == noise.samples.size());
    for (std::size_t i = 0; i < noise.samples.size(); ++i)
        CHECK(std::abs(noise_back.samples[i] - noise.samples[i]) <= 1.0 / 32768.0);

    Clip empty;
    empty.clip_id = "e";
    empty.sample_rate = 8000;
    CHECK_THROWS_AS(save_audio(empty, tmp.file("e.wav")), ValidationError);
}

TEST_CASE("config parses overrides and rejects unknown keys") {
    const Config defaults = parse_config("{}");
    CHECK(defaults.min_votes == 20);
    CHECK(defaults.mos_bins == 8);
    CHECK(defaults.adapter_timeout_seconds == 120.0);
    CHECK(defaults.rmse_denominator == RmseDenominator::n_minus_one);

    const Config cfg = parse_config(R"({
        "seed": 7,
        "min_votes": 10,
        "adapters": {"opus": "opusenc {in} {out}"},
        "stage1_weights": {"white_noise": 1.0, "clipping": 3.0},
        "rmse_denominator": "n",
        "dataset_mean_weighting": "clip_count"
    })");
    CHECK(cfg.seed == 7);
    CHECK(cfg.min_votes == 10);
    CHECK(cfg.adapters.at("opus") == "opusenc {in} {out}");
    REQUIRE(cfg.stage1_weights.size() == 2);
    CHECK(cfg.stage1_weights[1].first == "clipping");
    CHECK(cfg.rmse_denominator == RmseDenominator::n);
    CHECK(cfg.dataset_mean_weighting == MeanWeighting::clip_count);

    CHECK_THROWS_WITH_AS((void)parse_config("{\"no_such_key\": 1}"),
                         doctest::Contains("no_such_key"), ValidationError);
    CHECK_THROWS_AS((void)parse_config("{\"min_votes\": 0}"), ValidationError);
}

TEST_CASE("derived seeds differ by label and match across calls") {
    const uint64_t a = derive_seed(1, "plan.stage1");
    const uint64_t b = derive_seed(1, "plan.stage2");
    const uint64_t c = derive_seed(2, "plan.stage1");
    CHECK(a != b);
    CHECK(a != c);
    CHECK(a == derive_seed(1, "plan.stage1"));

    Prng rng(9);
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    rng.shuffle(v);
    Prng rng2(9);
    std::vector<int> w{1, 2, 3, 4, 5, 6, 7, 8};
    rng2.shuffle(w);
    CHECK(v == w);
}

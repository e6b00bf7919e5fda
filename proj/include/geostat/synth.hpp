// Copyright 2026 The geostat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "geostat/common.hpp"
#include "geostat/geo.hpp"

namespace geostat {

/// Synthetic-corpus knobs. Events are Thomas-like clusters: a parent spot
/// with Gaussian children, a temporal burst, a unique event tag, and three
/// kinds of co-tags:
///  - good terms: concentrated on the event's own pictures, biased toward
///    pictures lacking the event tag (they recover unreachable relevants);
///  - sync traps: shared by a same-tile, same-burst partner event, biased
///    toward event-tagged pictures (they drag in the partner's pictures);
///  - diffuse traps: on event pictures plus time-smeared copies across the
///    same city's background.
/// Background pictures are spatio-temporally uniform noise.
struct SynthConfig {
    std::uint64_t seed = 42;

    std::size_t cities = 12;  // populated 1-degree tiles
    std::size_t events = 150;
    std::size_t event_pics_min = 90;
    std::size_t event_pics_max = 140;
    double cluster_radius_km = 0.25;  // Gaussian sigma of event children
    double burst_width_days = 10.0;   // 4-sigma width of the time burst

    std::size_t background_pics = 10000;
    std::size_t noise_vocab = 800;
    std::size_t noise_tags_per_pic = 3;

    std::size_t goods_per_event = 2;
    double good_rate = 0.45;     // injection rate on non-event-tagged pictures
    double good_ev_bias = 0.6;   // multiplier on event-tagged pictures

    std::size_t cohort = 2;        // events sharing sync traps, tile and burst
    std::size_t syncs_per_cohort = 2;
    double sync_rate_ev = 0.33;  // p(sync tag | event-tagged picture)
    double sync_rate_rest = 0.02;

    double odd_rate_ev = 0.4;    // diffuse trap, event-tagged pictures
    double odd_rate_rest = 0.03;
    std::size_t odd_bg_copies = 70;  // same-city background copies

    // Per-event/per-cohort rates are jittered by U[1-x, 1+x] around the
    // knobs above, so no single document-frequency threshold separates the
    // co-tag kinds.
    double rate_jitter = 0.45;

    double p_event_tag = 0.55;
    double flag_rate_ev = 0.5;   // second query term, event-tagged pictures
    double flag_rate_rest = 0.05;
    double p_city_tag = 0.3;
    double city_bg_rate = 0.25;

    double p_geo_event = 0.92;
    double p_ts_event = 0.95;
    double p_geo_bg = 0.85;
    double p_ts_bg = 0.9;

    std::int64_t epoch_start = 1136073600;  // 2006-01-01
    double span_days = 1460.0;

    std::size_t train_queries = 100;
    std::size_t eval_queries = 50;

    static SynthConfig from_file(const std::string& path);
    void apply(const std::string& key, const std::string& value);
};

inline void SynthConfig::apply(const std::string& key, const std::string& value) {
    auto u = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
    auto z = [&] { return static_cast<std::size_t>(std::stoull(value)); };
    auto d = [&] { return std::stod(value); };
    if (key == "seed") seed = u();
    else if (key == "cities") cities = z();
    else if (key == "events") events = z();
    else if (key == "event_pics_min") event_pics_min = z();
    else if (key == "event_pics_max") event_pics_max = z();
    else if (key == "cluster_radius_km") cluster_radius_km = d();
    else if (key == "burst_width_days") burst_width_days = d();
    else if (key == "background_pics") background_pics = z();
    else if (key == "noise_vocab") noise_vocab = z();
    else if (key == "noise_tags_per_pic") noise_tags_per_pic = z();
    else if (key == "goods_per_event") goods_per_event = z();
    else if (key == "good_rate") good_rate = d();
    else if (key == "good_ev_bias") good_ev_bias = d();
    else if (key == "cohort") cohort = z();
    else if (key == "syncs_per_cohort") syncs_per_cohort = z();
    else if (key == "sync_rate_ev") sync_rate_ev = d();
    else if (key == "sync_rate_rest") sync_rate_rest = d();
    else if (key == "odd_rate_ev") odd_rate_ev = d();
    else if (key == "odd_rate_rest") odd_rate_rest = d();
    else if (key == "odd_bg_copies") odd_bg_copies = z();
    else if (key == "rate_jitter") rate_jitter = d();
    else if (key == "p_event_tag") p_event_tag = d();
    else if (key == "flag_rate_ev") flag_rate_ev = d();
    else if (key == "flag_rate_rest") flag_rate_rest = d();
    else if (key == "p_city_tag") p_city_tag = d();
    else if (key == "city_bg_rate") city_bg_rate = d();
    else if (key == "p_geo_event") p_geo_event = d();
    else if (key == "p_ts_event") p_ts_event = d();
    else if (key == "p_geo_bg") p_geo_bg = d();
    else if (key == "p_ts_bg") p_ts_bg = d();
    else if (key == "epoch_start") epoch_start = static_cast<std::int64_t>(std::stoll(value));
    else if (key == "span_days") span_days = d();
    else if (key == "train_queries") train_queries = z();
    else if (key == "eval_queries") eval_queries = z();
    else throw DataError("unknown synth config key: " + key);
}

/// Flat key=value lines; '#' starts a comment.
inline SynthConfig SynthConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read synth config: " + path);
    SynthConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            auto last = s.find_last_not_of(" \t\r");
            s.resize(last == std::string::npos ? 0 : last + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.apply(key, value);
    }
    return cfg;
}

struct SynthOutput {
    std::string corpus_path;
    std::string truth_path;
    std::string train_queries_path;
    std::string eval_queries_path;
};

namespace detail {

struct SynthPicture {
    std::string id;
    bool has_geo = false;
    double lat = 0.0, lon = 0.0;
    bool has_ts = false;
    std::int64_t ts = 0;
    std::vector<std::string> tags;

    std::string to_json() const {
        std::ostringstream os;
        os.precision(10);
        os << "{\"id\":\"" << id << "\",";
        if (has_geo)
            os << "\"lat\":" << lat << ",\"lon\":" << lon << ",";
        else
            os << "\"lat\":null,\"lon\":null,";
        if (has_ts)
            os << "\"ts\":" << ts << ",";
        else
            os << "\"ts\":null,";
        os << "\"tags\":[";
        for (std::size_t i = 0; i < tags.size(); ++i)
            os << (i ? ",\"" : "\"") << tags[i] << '"';
        os << "]}";
        return os.str();
    }
};

}  // namespace detail

/// Deterministically generates corpus, ground truth and the two query files.
inline SynthOutput generate_synth(const SynthConfig& cfg, const std::string& out_dir) {
    auto rng = make_rng(derive_seed(cfg.seed, 0xc0de));
    auto chance = [&](double p) { return uniform01(rng) < p; };

    // City tiles spread over temperate latitudes, all distinct.
    static constexpr int kLatChoices[] = {51, 40, -33, 35, 48, 37, 55, -23, 41, 52, 45, -36};
    std::vector<std::int32_t> city_tiles;
    std::vector<int> city_lat, city_lon;
    for (std::size_t c = 0; c < cfg.cities; ++c) {
        int lat = kLatChoices[c % (sizeof(kLatChoices) / sizeof(int))];
        int lon = -170 + static_cast<int>((c * 29) % 340);
        city_lat.push_back(lat);
        city_lon.push_back(lon);
        city_tiles.push_back(tile_id_from_floors(lat, lon));
    }

    const double span_s = cfg.span_days * 86400.0;
    const double burst_sigma_s = cfg.burst_width_days * 86400.0 / 4.0;
    std::size_t cohorts = cfg.cohort > 0 ? (cfg.events + cfg.cohort - 1) / cfg.cohort : 0;

    auto jitter = [&](double base) {
        double f = 1.0 - cfg.rate_jitter + 2.0 * cfg.rate_jitter * uniform01(rng);
        return std::clamp(base * f, 0.02, 0.95);
    };

    // Cohort layout: shared city, burst center and sync-trap rates.
    std::vector<std::size_t> cohort_city(cohorts);
    std::vector<double> cohort_burst(cohorts);
    std::vector<std::vector<double>> cohort_sync_ev(cohorts), cohort_sync_rest(cohorts);
    for (std::size_t c = 0; c < cohorts; ++c) {
        cohort_city[c] = c % cfg.cities;
        cohort_burst[c] =
            static_cast<double>(cfg.epoch_start) + (0.05 + 0.9 * uniform01(rng)) * span_s;
        for (std::size_t s = 0; s < cfg.syncs_per_cohort; ++s) {
            cohort_sync_ev[c].push_back(jitter(cfg.sync_rate_ev));
            cohort_sync_rest[c].push_back(jitter(cfg.sync_rate_rest));
        }
    }

    // Event spots: uniform inside the tile with a margin, partners kept at
    // least 5 km apart so the sync trap's pattern is visibly multi-modal.
    struct Event {
        std::size_t city = 0, cohort = 0;
        double lat = 0.0, lon = 0.0;
        double burst = 0.0;
        std::size_t n_pics = 0;
        std::vector<double> good_rates;  // per good tag, jittered
        double good_bias = 0.0;
        double odd_ev = 0.0, odd_rest = 0.0;
    };
    std::vector<Event> events(cfg.events);
    std::vector<std::pair<double, double>> cohort_first_spot(cohorts, {0.0, 0.0});
    for (std::size_t e = 0; e < cfg.events; ++e) {
        Event& ev = events[e];
        ev.cohort = cfg.cohort > 0 ? e / cfg.cohort : e;
        ev.city = cohort_city[ev.cohort % cohorts];
        ev.burst = cohort_burst[ev.cohort % cohorts];
        std::int32_t tile = city_tiles[ev.city];
        double wkm = tile_width_km(tile);
        for (int attempt = 0; attempt < 64; ++attempt) {
            ev.lat = city_lat[ev.city] + 0.12 + 0.76 * uniform01(rng);
            ev.lon = city_lon[ev.city] + 0.12 + 0.76 * uniform01(rng);
            if (e % cfg.cohort == 0) {
                cohort_first_spot[ev.cohort] = {ev.lat, ev.lon};
                break;
            }
            auto [flat, flon] = cohort_first_spot[ev.cohort];
            double dy = (ev.lat - flat) * kKmPerDegree;
            double dx = (ev.lon - flon) * (wkm);
            if (dx * dx + dy * dy >= 25.0) break;
        }
        ev.n_pics = cfg.event_pics_min +
                    (cfg.event_pics_max > cfg.event_pics_min
                         ? uniform_index(rng, cfg.event_pics_max - cfg.event_pics_min + 1)
                         : 0);
        for (std::size_t g = 0; g < cfg.goods_per_event; ++g)
            ev.good_rates.push_back(jitter(cfg.good_rate));
        ev.good_bias = jitter(cfg.good_ev_bias);
        ev.odd_ev = jitter(cfg.odd_rate_ev);
        ev.odd_rest = jitter(cfg.odd_rate_rest);
    }

    std::vector<detail::SynthPicture> pics;
    std::map<std::string, std::vector<std::string>> truth;  // event id -> pic ids
    std::size_t pic_counter = 0;
    auto next_id = [&] { return "p" + std::to_string(pic_counter++); };

    for (std::size_t e = 0; e < cfg.events; ++e) {
        const Event& ev = events[e];
        std::int32_t tile = city_tiles[ev.city];
        double wkm = tile_width_km(tile);
        std::string ev_tag = "ev" + std::to_string(e);
        std::string flag_tag = "flag" + std::to_string(e);
        std::string odd_tag = "odd" + std::to_string(e);
        std::vector<std::string> sync_tags;
        for (std::size_t s = 0; s < cfg.syncs_per_cohort; ++s)
            sync_tags.push_back("sync" + std::to_string(ev.cohort) + "x" + std::to_string(s));
        auto& cluster = truth[ev_tag];
        for (std::size_t i = 0; i < ev.n_pics; ++i) {
            detail::SynthPicture p;
            p.id = next_id();
            if (chance(cfg.p_geo_event)) {
                p.has_geo = true;
                do {
                    p.lat = ev.lat + normal01(rng) * cfg.cluster_radius_km / kKmPerDegree;
                    p.lon = ev.lon + normal01(rng) * cfg.cluster_radius_km / wkm;
                } while (std::floor(p.lat) != city_lat[ev.city] ||
                         std::floor(p.lon) != city_lon[ev.city]);
            }
            if (chance(cfg.p_ts_event)) {
                p.has_ts = true;
                p.ts = static_cast<std::int64_t>(ev.burst + normal01(rng) * burst_sigma_s);
            }
            bool tagged_ev = chance(cfg.p_event_tag);
            if (tagged_ev) p.tags.push_back(ev_tag);
            if (chance(tagged_ev ? cfg.flag_rate_ev : cfg.flag_rate_rest))
                p.tags.push_back(flag_tag);
            if (chance(cfg.p_city_tag)) p.tags.push_back("city" + std::to_string(ev.city));
            for (std::size_t g = 0; g < cfg.goods_per_event; ++g) {
                double rate = tagged_ev ? ev.good_rates[g] * ev.good_bias : ev.good_rates[g];
                if (chance(rate))
                    p.tags.push_back("good" + std::to_string(e) + "x" + std::to_string(g));
            }
            if (cfg.cohort > 1) {
                for (std::size_t s = 0; s < cfg.syncs_per_cohort; ++s) {
                    double rate = tagged_ev ? cohort_sync_ev[ev.cohort % cohorts][s]
                                            : cohort_sync_rest[ev.cohort % cohorts][s];
                    if (chance(rate)) p.tags.push_back(sync_tags[s]);
                }
            }
            if (chance(tagged_ev ? ev.odd_ev : ev.odd_rest)) p.tags.push_back(odd_tag);
            for (std::size_t t = 0; t < cfg.noise_tags_per_pic; ++t)
                if (chance(0.8))
                    p.tags.push_back("n" + std::to_string(uniform_index(rng, cfg.noise_vocab)));
            cluster.push_back(p.id);
            pics.push_back(std::move(p));
        }
    }

    // Background noise, uniform over each city tile and the whole span.
    std::vector<std::vector<std::size_t>> bg_by_city(cfg.cities);
    std::size_t bg_per_city = cfg.cities ? cfg.background_pics / cfg.cities : 0;
    for (std::size_t c = 0; c < cfg.cities; ++c) {
        for (std::size_t i = 0; i < bg_per_city; ++i) {
            detail::SynthPicture p;
            p.id = next_id();
            if (chance(cfg.p_geo_bg)) {
                p.has_geo = true;
                p.lat = city_lat[c] + uniform01(rng);
                p.lon = city_lon[c] + uniform01(rng);
            }
            if (chance(cfg.p_ts_bg)) {
                p.has_ts = true;
                p.ts = cfg.epoch_start + static_cast<std::int64_t>(uniform01(rng) * span_s);
            }
            if (chance(cfg.city_bg_rate)) p.tags.push_back("city" + std::to_string(c));
            for (std::size_t t = 0; t < cfg.noise_tags_per_pic; ++t)
                if (chance(0.8))
                    p.tags.push_back("n" + std::to_string(uniform_index(rng, cfg.noise_vocab)));
            bg_by_city[c].push_back(pics.size());
            pics.push_back(std::move(p));
        }
    }

    // Diffuse-trap copies: same city, background pictures, arbitrary times.
    for (std::size_t e = 0; e < cfg.events; ++e) {
        const auto& pool = bg_by_city[events[e].city];
        if (pool.empty()) continue;
        std::string odd_tag = "odd" + std::to_string(e);
        for (std::size_t i = 0; i < cfg.odd_bg_copies; ++i) {
            auto& p = pics[pool[uniform_index(rng, pool.size())]];
            if (std::find(p.tags.begin(), p.tags.end(), odd_tag) == p.tags.end())
                p.tags.push_back(odd_tag);
        }
    }

    SynthOutput out;
    out.corpus_path = out_dir + "/corpus.jsonl";
    out.truth_path = out_dir + "/truth.jsonl";
    out.train_queries_path = out_dir + "/queries_train.jsonl";
    out.eval_queries_path = out_dir + "/queries_eval.jsonl";

    {
        std::ofstream f(out.corpus_path);
        if (!f) throw DataError("cannot write " + out.corpus_path);
        for (const auto& p : pics) f << p.to_json() << '\n';
    }
    {
        std::ofstream f(out.truth_path);
        if (!f) throw DataError("cannot write " + out.truth_path);
        for (const auto& [ev, ids] : truth) {
            f << "{\"event\":\"" << ev << "\",\"pictures\":[";
            for (std::size_t i = 0; i < ids.size(); ++i) f << (i ? ",\"" : "\"") << ids[i] << '"';
            f << "]}\n";
        }
    }
    auto write_queries = [&](const std::string& path, std::size_t from, std::size_t count) {
        std::ofstream f(path);
        if (!f) throw DataError("cannot write " + path);
        for (std::size_t e = from; e < from + count && e < cfg.events; ++e) {
            f << "{\"id\":\"ev" << e << "\",\"terms\":[\"ev" << e << "\",\"flag" << e
              << "\"]}\n";
        }
    };
    write_queries(out.train_queries_path, 0, cfg.train_queries);
    write_queries(out.eval_queries_path, cfg.train_queries, cfg.eval_queries);
    return out;
}

}  // namespace geostat

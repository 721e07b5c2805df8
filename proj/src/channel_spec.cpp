#include "sdcexp/channel_spec.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdcexp/util.hpp"

namespace sdcexp {

namespace {
constexpr double kSpecTol = 1e-9;

std::vector<double> renormalized(std::vector<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
    return v;
}
}  // namespace

void ChannelSpec::validate() const {
    if (s_size < 1) throw SpecError("s_size must be >= 1");
    if (x_size < 1) throw SpecError("x_size must be >= 1");
    if (y_size < 1) throw SpecError("y_size must be >= 1");
    if (state_dist.size() != static_cast<std::size_t>(s_size))
        throw SpecError("state_dist has " + std::to_string(state_dist.size()) +
                        " entries, expected s_size = " + std::to_string(s_size));
    double sum = 0.0;
    for (std::size_t i = 0; i < state_dist.size(); ++i) {
        if (!(state_dist[i] >= 0.0))
            throw SpecError("state_dist[" + std::to_string(i) + "] is negative or not a number");
        sum += state_dist[i];
    }
    if (std::abs(sum - 1.0) > kSpecTol)
        throw SpecError("state_dist sums to " + format_sig(sum) + ", expected 1 within 1e-9");

    if (w.size() != static_cast<std::size_t>(s_size) * x_size * y_size)
        throw SpecError("w has wrong shape, expected s_size x x_size x y_size");
    for (int s = 0; s < s_size; ++s)
        for (int x = 0; x < x_size; ++x) {
            double row = 0.0;
            for (int y = 0; y < y_size; ++y) {
                const double v = w[(static_cast<std::size_t>(s) * x_size + x) * y_size + y];
                if (!(v >= 0.0))
                    throw SpecError("w[" + std::to_string(s) + "][" + std::to_string(x) +
                                    "] has a negative or non-numeric entry");
                row += v;
            }
            if (std::abs(row - 1.0) > kSpecTol)
                throw SpecError("w[" + std::to_string(s) + "][" + std::to_string(x) +
                                "] sums to " + format_sig(row) + ", expected 1 within 1e-9");
        }
}

Channel ChannelSpec::channel() const {
    validate();
    std::vector<double> rows(w.size());
    for (int s = 0; s < s_size; ++s)
        for (int x = 0; x < x_size; ++x) {
            const std::size_t base = (static_cast<std::size_t>(s) * x_size + x) * y_size;
            std::vector<double> row(w.begin() + base, w.begin() + base + y_size);
            row = renormalized(std::move(row));
            std::copy(row.begin(), row.end(), rows.begin() + base);
        }
    return Channel(s_size, x_size, y_size, std::move(rows));
}

Dist ChannelSpec::state() const {
    validate();
    return Dist(renormalized(state_dist));
}

ChannelSpec parse_channel_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    ChannelSpec spec;
    try {
        if (j.contains("name")) spec.name = j.at("name").get<std::string>();
        spec.s_size = j.at("s_size").get<int>();
        spec.x_size = j.at("x_size").get<int>();
        spec.y_size = j.at("y_size").get<int>();
        spec.state_dist = j.at("state_dist").get<std::vector<double>>();
        const auto& wj = j.at("w");
        if (!wj.is_array() || wj.size() != static_cast<std::size_t>(spec.s_size))
            throw SpecError("w must be an array of s_size state slices");
        for (int s = 0; s < spec.s_size; ++s) {
            const auto& xs = wj.at(static_cast<std::size_t>(s));
            if (!xs.is_array() || xs.size() != static_cast<std::size_t>(spec.x_size))
                throw SpecError("w[" + std::to_string(s) + "] must have x_size rows");
            for (int x = 0; x < spec.x_size; ++x) {
                const auto& row = xs.at(static_cast<std::size_t>(x));
                if (!row.is_array() || row.size() != static_cast<std::size_t>(spec.y_size))
                    throw SpecError("w[" + std::to_string(s) + "][" + std::to_string(x) +
                                    "] must have y_size entries");
                for (int y = 0; y < spec.y_size; ++y)
                    spec.w.push_back(row.at(static_cast<std::size_t>(y)).get<double>());
            }
        }
    } catch (const SpecError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("spec field error: ") + e.what());
    }
    spec.validate();
    return spec;
}

ChannelSpec load_channel_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open channel spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_channel_spec(ss.str());
}

}  // namespace sdcexp

#pragma once

#include <optional>
#include <string>

#include "sdcexp/probability.hpp"

namespace sdcexp {

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// On-disk channel description (JSON). Row sums are accepted within 1e-9 and
// explicitly renormalized when the validated spec is turned into the exact
// in-memory objects.
struct ChannelSpec {
    std::string name;
    int s_size = 0;
    int x_size = 0;
    int y_size = 0;
    std::vector<double> state_dist;
    std::vector<double> w;  // [s][x][y]

    void validate() const;  // throws SpecError naming the offending field/row
    Channel channel() const;
    Dist state() const;
};

ChannelSpec load_channel_spec(const std::string& path);
ChannelSpec parse_channel_spec(const std::string& json_text);

}  // namespace sdcexp

#include "herman/ring.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <optional>
#include <sstream>

#include "herman/errors.hpp"

namespace herman {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("malformed integer '" + std::string(text) + "' in " +
                          std::string(what));
  }
  return value;
}

std::vector<int> parse_int_list(std::string_view text, std::string_view what) {
  std::vector<int> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_int(text.substr(start, comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class Seq>
std::string join(const Seq& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << values[i];
  }
  return os.str();
}

}  // namespace

Configuration::Configuration(int ring_size, std::vector<int> positions)
    : ring_size_(ring_size), positions_(std::move(positions)) {
  require(ring_size_ >= 3, "ring size must be at least 3");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    require(positions_[i] >= 1 && positions_[i] <= ring_size_,
            "token position out of range 1..N");
    require(i == 0 || positions_[i - 1] < positions_[i],
            "token positions must be strictly increasing");
  }
}

GapVector::GapVector(int ring_size, std::vector<int> gaps)
    : ring_size_(ring_size), gaps_(std::move(gaps)) {
  require(ring_size_ >= 3, "ring size must be at least 3");
  if (gaps_.empty()) return;
  for (int g : gaps_) require(g >= 1, "gaps must be positive");
  require(std::accumulate(gaps_.begin(), gaps_.end(), 0) == ring_size_,
          "gaps must sum to N");
}

MoveMask MoveMask::from_word(std::uint64_t word, int count) {
  std::vector<bool> moves(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) moves[i] = ((word >> i) & 1U) != 0;
  return MoveMask(std::move(moves));
}

GapVector gap_vector(const Configuration& config) {
  const auto& z = config.positions();
  const int k = config.token_count();
  if (k == 0) return GapVector(config.ring_size(), {});
  std::vector<int> gaps(static_cast<std::size_t>(k));
  gaps[0] = config.ring_size() + z.front() - z.back();
  for (int i = 1; i < k; ++i) gaps[i] = z[i] - z[i - 1];
  return GapVector(config.ring_size(), std::move(gaps));
}

Configuration config_from_gaps(const GapVector& gaps) {
  std::vector<int> positions;
  if (gaps.token_count() > 0) {
    positions.push_back(1);
    for (int i = 1; i < gaps.token_count(); ++i) positions.push_back(positions.back() + gaps[i]);
  }
  return Configuration(gaps.ring_size(), std::move(positions));
}

Configuration apply_step(const Configuration& config, const MoveMask& mask) {
  const int n = config.ring_size();
  require(mask.size() == static_cast<std::size_t>(config.token_count()),
          "mask length must equal token count");
  // Occupancy parity per process: a process can keep one token and receive one,
  // never more, so parity is exactly "holds a token after annihilation".
  std::vector<unsigned char> occupied(static_cast<std::size_t>(n), 0);
  const auto& z = config.positions();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const int p = mask[i] ? (z[i] % n) + 1 : z[i];
    occupied[p - 1] ^= 1U;
  }
  std::vector<int> next;
  next.reserve(z.size());
  for (int p = 1; p <= n; ++p) {
    if (occupied[p - 1]) next.push_back(p);
  }
  return Configuration(n, std::move(next));
}

MoveMask random_mask(int token_count, RandomStream& rng) {
  std::vector<bool> moves(static_cast<std::size_t>(token_count));
  for (int i = 0; i < token_count; ++i) moves[i] = rng.coin();
  return MoveMask(std::move(moves));
}

Configuration random_step(const Configuration& config, RandomStream& rng) {
  return apply_step(config, random_mask(config.token_count(), rng));
}

BitRing bits_from_config(const Configuration& config) {
  const int n = config.ring_size();
  require(n % 2 == 1, "bit representation requires an odd ring size");
  require(config.token_count() % 2 == 1,
          "bit representation on an odd ring forces an odd token count");
  std::vector<bool> holds(static_cast<std::size_t>(n), false);
  for (int p : config.positions()) holds[p - 1] = true;
  BitRing ring{std::vector<bool>(static_cast<std::size_t>(n), false)};
  for (int p = 2; p <= n; ++p) {
    ring.bits[p - 1] = holds[p - 1] ? ring.bits[p - 2] : !ring.bits[p - 2];
  }
  return ring;
}

Configuration config_from_bits(const BitRing& ring) {
  const int n = ring.ring_size();
  std::vector<int> positions;
  for (int p = 1; p <= n; ++p) {
    const int left = (p == 1) ? n : p - 1;
    if (ring.bits[p - 1] == ring.bits[left - 1]) positions.push_back(p);
  }
  return Configuration(n, std::move(positions));
}

BitRing bit_step(const BitRing& ring, const std::vector<bool>& coins) {
  const int n = ring.ring_size();
  require(n % 2 == 1, "bit protocol requires an odd ring size");
  require(coins.size() == ring.bits.size(), "one coin per process required");
  BitRing next = ring;
  for (int p = 1; p <= n; ++p) {
    const int left = (p == 1) ? n : p - 1;
    const bool token = ring.bits[p - 1] == ring.bits[left - 1];
    if (token && coins[p - 1]) next.bits[p - 1] = !ring.bits[p - 1];
  }
  return next;
}

MoveMask coupled_mask(const Configuration& config, const std::vector<bool>& coins) {
  std::vector<bool> moves;
  moves.reserve(config.positions().size());
  for (int p : config.positions()) moves.push_back(coins.at(static_cast<std::size_t>(p - 1)));
  return MoveMask(std::move(moves));
}

Configuration rotate_positions(const Configuration& config, int offset) {
  const int n = config.ring_size();
  std::vector<int> moved;
  moved.reserve(config.positions().size());
  for (int p : config.positions()) moved.push_back((((p - 1 + offset) % n) + n) % n + 1);
  std::sort(moved.begin(), moved.end());
  return Configuration(n, std::move(moved));
}

GapVector canonical_rotation(const GapVector& gaps) {
  const auto& g = gaps.gaps();
  const std::size_t k = g.size();
  if (k <= 1) return gaps;
  std::size_t best = 0;
  for (std::size_t s = 1; s < k; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      const int a = g[(s + j) % k];
      const int b = g[(best + j) % k];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }
  std::vector<int> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = g[(best + j) % k];
  return GapVector(gaps.ring_size(), std::move(out));
}

Configuration parse_configuration(std::string_view literal) {
  std::optional<int> n;
  std::optional<std::vector<int>> tokens;
  std::optional<std::vector<int>> gaps;
  std::size_t start = 0;
  while (start <= literal.size()) {
    const auto semi = literal.find(';', start);
    const auto item = trim(literal.substr(start, semi - start));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw InvalidArgument("malformed configuration item '" + std::string(item) + "'");
      }
      const auto key = trim(item.substr(0, eq));
      const auto value = item.substr(eq + 1);
      if (key == "N") {
        n = parse_int(value, "N");
      } else if (key == "tokens") {
        tokens = parse_int_list(value, "tokens");
      } else if (key == "gaps") {
        gaps = parse_int_list(value, "gaps");
      } else {
        throw InvalidArgument("unknown configuration key '" + std::string(key) + "'");
      }
    }
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  require(n.has_value(), "configuration literal needs N=");
  require(tokens.has_value() != gaps.has_value(),
          "configuration literal needs exactly one of tokens= or gaps=");
  if (tokens) return Configuration(*n, std::move(*tokens));
  require(!gaps->empty(), "gaps= must list at least one gap");
  return config_from_gaps(GapVector(*n, std::move(*gaps)));
}

std::string to_token_literal(const Configuration& config) {
  return "N=" + std::to_string(config.ring_size()) + ";tokens=" + join(config.positions());
}

std::string to_gap_literal(const GapVector& gaps) {
  return "N=" + std::to_string(gaps.ring_size()) + ";gaps=" + join(gaps.gaps());
}

std::string join_gaps(const GapVector& gaps) { return join(gaps.gaps()); }

}  // namespace herman

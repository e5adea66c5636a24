#include "pin/noise.hpp"

#include <sstream>

#include "pin/congruence.hpp"

namespace pin {

noise_error::noise_error(int line, const std::string& what)
    : std::runtime_error("noise model error at line " + std::to_string(line) + ": " + what),
      line(line) {}

rational noise_row::probability(const name& received) const {
  auto it = support.find(received);
  return it == support.end() ? rational(0) : it->second;
}

bool noise_row::is_identity_on(const name& input) const {
  return support.size() == 1 && support.begin()->first == input &&
         support.begin()->second == rational(1);
}

void noise_model::set_row(const name& channel, const name& input, noise_row row) {
  rational sum(0);
  for (const auto& [received, p] : row.support) {
    if (p <= rational(0) || p > rational(1))
      throw noise_error(0, "entry p_" + channel.id + "(" + received.id + "|" + input.id + ") = " +
                               to_string(p) + " outside (0, 1]");
    sum += p;
  }
  if (sum != rational(1))
    throw noise_error(0, "row sum " + to_string(sum) + " != 1 for channel " + channel.id +
                             ", input " + input.id);
  rows_[{channel, input}] = std::move(row);
}

bool noise_model::has_row(const name& channel, const name& input) const {
  return rows_.count({channel, input}) > 0;
}

noise_row noise_model::row(const name& channel, const name& input) const {
  auto it = rows_.find({channel, input});
  if (it != rows_.end()) return it->second;
  noise_row identity;
  identity.support[input] = rational(1);
  return identity;
}

name_set noise_model::mentioned_names() const {
  name_set out;
  for (const auto& [key, row] : rows_) {
    out.insert(key.first);
    out.insert(key.second);
    for (const auto& [received, p] : row.support) out.insert(received);
  }
  return out;
}

std::vector<std::pair<name, name>> noise_model::rows_dropping_input() const {
  std::vector<std::pair<name, name>> out;
  for (const auto& [key, row] : rows_)
    if (row.probability(key.second) == rational(0)) out.push_back(key);
  return out;
}

// --- file format -----------------------------------------------------------

namespace {

void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

bool parse_name_at(const std::string& s, size_t& i, name& out) {
  skip_ws(s, i);
  if (i >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i]))) return false;
  std::string word;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
    word.push_back(s[i]);
    ++i;
  }
  out = name(word);
  return true;
}

bool expect_char(const std::string& s, size_t& i, char c) {
  skip_ws(s, i);
  if (i >= s.size() || s[i] != c) return false;
  ++i;
  return true;
}

} // namespace

noise_model load_noise_model(const std::string& text) {
  noise_model nm;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    size_t i = 0;
    skip_ws(line, i);
    if (i >= line.size()) continue;

    name channel;
    if (!parse_name_at(line, i, channel)) throw noise_error(line_no, "expected a channel name");
    if (channel.id == "channel") {
      if (!parse_name_at(line, i, channel)) throw noise_error(line_no, "expected a channel name");
    }
    if (!expect_char(line, i, ':')) throw noise_error(line_no, "expected ':' after channel");
    name input;
    if (!parse_name_at(line, i, input)) throw noise_error(line_no, "expected an input name");
    if (!expect_char(line, i, '-') || !expect_char(line, i, '>'))
      throw noise_error(line_no, "expected '->' after input name");
    if (!expect_char(line, i, '{')) throw noise_error(line_no, "expected '{'");

    noise_row row;
    for (;;) {
      name received;
      if (!parse_name_at(line, i, received)) throw noise_error(line_no, "expected a name in row");
      if (!expect_char(line, i, ':')) throw noise_error(line_no, "expected ':' after name");
      skip_ws(line, i);
      size_t start = i;
      while (i < line.size() && line[i] != ',' && line[i] != '}' && line[i] != ' ' &&
             line[i] != '\t')
        ++i;
      rational p;
      try {
        p = parse_rational(line.substr(start, i - start));
      } catch (const std::invalid_argument& e) {
        throw noise_error(line_no, e.what());
      }
      if (row.support.count(received))
        throw noise_error(line_no, "duplicate entry for '" + received.id + "'");
      if (p < rational(0) || p > rational(1))
        throw noise_error(line_no, "probability " + to_string(p) + " outside [0, 1]");
      if (p > rational(0)) row.support[received] = p;
      skip_ws(line, i);
      if (expect_char(line, i, ',')) continue;
      if (expect_char(line, i, '}')) break;
      throw noise_error(line_no, "expected ',' or '}' in row");
    }
    skip_ws(line, i);
    if (i < line.size()) throw noise_error(line_no, "trailing characters after row");

    rational sum(0);
    for (const auto& [received, p] : row.support) sum += p;
    if (sum != rational(1))
      throw noise_error(line_no, "row sum " + to_string(sum) + " != 1 for channel " + channel.id +
                                     ", input " + input.id);
    try {
      nm.set_row(channel, input, std::move(row));
    } catch (const noise_error& e) {
      throw noise_error(line_no, e.what());
    }
  }
  return nm;
}

std::string render_noise_model(const noise_model& nm) {
  std::ostringstream out;
  for (const auto& [key, row] : nm.rows()) {
    out << "channel " << key.first.id << " : " << key.second.id << " -> { ";
    bool first = true;
    for (const auto& [received, p] : row.support) {
      if (!first) out << ", ";
      out << received.id << ": " << to_string(p);
      first = false;
    }
    out << " }\n";
  }
  return out.str();
}

noise_row noise_row_of(const noise_model& nm, const name& channel, const name& input) {
  return nm.row(channel, input);
}

// --- substitution predicates -------------------------------------------------

bool is_consistent(const substitution& s, const proc& p, const noise_model& nm) {
  proc image = apply_substitution(p, s);
  name_set wbn_image = weakly_bound_names(image);
  if (wbn_image.empty()) return true;
  name_set fn_star = noisy_free_names(p, nm);
  // z.sigma lands in wbn(p.sigma) for z in dom(sigma) with image there, and
  // for every fixed point z in wbn(p.sigma) itself.
  name_set candidates = wbn_image;
  for (const auto& [from, to] : s.mapping())
    if (wbn_image.count(to)) candidates.insert(from);
  for (const auto& z : candidates) {
    if (!wbn_image.count(s(z))) continue;
    if (fn_star.count(z)) return false;
  }
  return true;
}

bool is_compatible(const substitution& s, const name& channel, const noise_model& nm) {
  const name channel_image = s(channel);
  name_set inputs;
  for (const auto& [key, row] : nm.rows()) {
    if (key.first == channel || key.first == channel_image) inputs.insert(key.second);
  }
  auto dom = s.domain();
  auto rng = s.range();
  inputs.insert(dom.begin(), dom.end());
  inputs.insert(rng.begin(), rng.end());
  name_set avoid = inputs;
  avoid.insert(channel);
  avoid.insert(channel_image);
  auto mentioned = nm.mentioned_names();
  avoid.insert(mentioned.begin(), mentioned.end());
  inputs.insert(fresh_name(avoid));

  for (const auto& input : inputs) {
    noise_row original = nm.row(channel, input);
    std::map<name, rational> pushforward;
    for (const auto& [received, p] : original.support) pushforward[s(received)] += p;
    noise_row target = nm.row(channel_image, s(input));
    if (pushforward != target.support) return false;
  }
  return true;
}

} // namespace pin

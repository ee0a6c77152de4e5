#include "softdd/sequences.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>

namespace softdd {

Mat3 pulse_rotation(const PulseInstance& pulse, const PulseShape& shape, double t_local) {
  if (pulse.free) return Mat3::Identity();
  return active_rotation(pulse.axis, -pulse.sign * pulse.scale * phase(shape, t_local));
}

Sequence::Sequence(std::string name, PulseShape shape, std::vector<PulseInstance> pulses)
    : name_(std::move(name)), shape_(std::move(shape)), pulses_(std::move(pulses)) {
  if (pulses_.empty()) throw Error(ErrorCode::InvalidArgument, "sequence has no slots");
  for (const auto& p : pulses_) {
    if (std::abs(p.axis.norm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "pulse axis must have unit norm");
    }
  }
  prefix_.reserve(pulses_.size() + 1);
  prefix_.push_back(Mat3::Identity());
  for (int k = 0; k < size(); ++k) {
    prefix_.push_back(pulse_rotation(slot(k), shape_, shape_.tau_p()) * prefix_.back());
  }
}

std::string Sequence::dsl() const {
  std::ostringstream out;
  out.precision(12);
  for (std::size_t i = 0; i < pulses_.size(); ++i) {
    const PulseInstance& p = pulses_[i];
    if (i) out << ' ';
    if (p.free) {
      out << '0';
      continue;
    }
    if (p.sign < 0) out << '-';
    out << (std::abs(p.axis.x()) > 0.5 ? 'X' : 'Y');
    if (p.scale != 1.0) out << "^{" << p.scale * shape_.phi0() << '}';
  }
  return out.str();
}

std::vector<PulseInstance> parse_dsl(std::string_view dsl, double phi0) {
  std::vector<PulseInstance> out;
  std::size_t i = 0;
  const auto fail = [&](const std::string& msg) {
    return Error(ErrorCode::UnknownSequence,
                 "sequence '" + std::string(dsl) + "' at offset " + std::to_string(i) + ": " + msg);
  };
  while (i < dsl.size()) {
    if (std::isspace(static_cast<unsigned char>(dsl[i]))) {
      ++i;
      continue;
    }
    PulseInstance p;
    if (dsl[i] == '-') {
      p.sign = -1;
      ++i;
    } else if (dsl[i] == '+') {
      ++i;
    }
    if (i >= dsl.size()) throw fail("dangling sign");
    switch (std::toupper(static_cast<unsigned char>(dsl[i]))) {
      case 'X': p.axis = Vec3::UnitX(); break;
      case 'Y': p.axis = Vec3::UnitY(); break;
      case '0':
        if (p.sign < 0) throw fail("free slot cannot carry a sign");
        p.free = true;
        break;
      default: throw fail("expected X, Y or 0");
    }
    ++i;
    if (i < dsl.size() && dsl[i] == '^') {
      if (p.free) throw fail("free slot cannot carry an angle");
      if (i + 1 >= dsl.size() || dsl[i + 1] != '{') throw fail("expected '{' after '^'");
      const auto close = dsl.find('}', i + 2);
      if (close == std::string_view::npos) throw fail("unterminated angle");
      double angle = 0.0;
      try {
        angle = parse_angle(dsl.substr(i + 2, close - i - 2));
      } catch (const Error& e) {
        throw fail(e.what());
      }
      if (phi0 == 0.0) throw fail("angle override needs a shape with nonzero phi0");
      p.scale = angle / phi0;
      i = close + 1;
    }
    out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::UnknownSequence, "empty sequence");
  return out;
}

namespace {

std::string join(std::initializer_list<std::string_view> parts) {
  std::string s;
  for (auto p : parts) {
    if (!s.empty()) s += ' ';
    s += p;
  }
  return s;
}

std::string invert_signs(std::string_view dsl) {
  std::string out;
  std::istringstream in{std::string(dsl)};
  for (std::string tok; in >> tok;) {
    if (!out.empty()) out += ' ';
    if (tok == "0") {
      out += tok;
    } else {
      out += tok.front() == '-' ? tok.substr(1) : "-" + tok;
    }
  }
  return out;
}

std::string reverse_tokens(std::string_view dsl) {
  std::vector<std::string> toks;
  std::istringstream in{std::string(dsl)};
  for (std::string tok; in >> tok;) toks.push_back(tok);
  std::reverse(toks.begin(), toks.end());
  std::string out;
  for (const auto& t : toks) out += (out.empty() ? "" : " ") + t;
  return out;
}

struct CatalogueEntry {
  std::string name;
  std::string dsl;
  double phi0;  // 0: any angle
};

const std::vector<CatalogueEntry>& catalogue() {
  static const std::vector<CatalogueEntry> entries = [] {
    constexpr std::string_view ra = "X -Y X", rb = "X Y X", ra_bar = "-X Y -X",
                               rb_bar = "-X -Y -X";
    const std::string s8 = "X Y -X Y Y -X Y X";
    const std::string half48 = join({ra, rb, ra_bar, rb, ra_bar, rb_bar, ra, rb_bar});
    return std::vector<CatalogueEntry>{
        {"none", "0", 0.0},
        {"X", "X", 0.0},
        {"Y", "Y", 0.0},
        {"2s", "X X", kPi},
        {"2a", "-X X", kPi},
        {"4a", "-X -X X X", kPi},
        {"4p", "X Y -X Y", kPi},
        {"8s", s8, kPi},
        {"8a", "X Y -X Y -Y X -Y -X", kPi},
        {"16a", s8 + " " + invert_signs(s8), kPi},
        {"5", "X Y 0 -Y -X", kPi / 2},
        {"12", join({ra, rb, ra_bar, rb}), kPi / 2},
        {"24", join({ra, rb, ra_bar, rb, rb, ra_bar, rb, ra}), kPi / 2},
        {"48", half48 + " " + reverse_tokens(half48), kPi / 2},
    };
  }();
  return entries;
}

const CatalogueEntry* find_entry(std::string_view name) {
  for (const auto& e : catalogue()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> catalogue_sequence_names() {
  std::vector<std::string> names;
  for (const auto& e : catalogue()) names.push_back(e.name);
  return names;
}

std::string canonical_dsl(std::string_view name) {
  if (const auto* e = find_entry(name)) return e->dsl;
  throw Error(ErrorCode::UnknownSequence, "no catalogue sequence '" + std::string(name) + "'");
}

Sequence catalogue_sequence(std::string_view name, const PulseShape& shape) {
  const auto* e = find_entry(name);
  if (!e) throw Error(ErrorCode::UnknownSequence, "no catalogue sequence '" + std::string(name) + "'");
  if (e->phi0 != 0.0 && std::abs(shape.phi0() - e->phi0) > 1e-9) {
    throw Error(ErrorCode::AngleMismatch, "sequence " + e->name + " needs phi0 = " +
                                              std::to_string(e->phi0) + ", shape '" + shape.name() +
                                              "' has " + std::to_string(shape.phi0()));
  }
  return Sequence(e->name, shape, parse_dsl(e->dsl, shape.phi0()));
}

Sequence make_sequence(std::string_view name_or_dsl, const PulseShape& shape) {
  if (find_entry(name_or_dsl)) return catalogue_sequence(name_or_dsl, shape);
  return Sequence(std::string(name_or_dsl), shape, parse_dsl(name_or_dsl, shape.phi0()));
}

Mat3 control_rotation(const Sequence& seq, double t) {
  const double tp = seq.tau_p();
  const double slack = 1e-12 * seq.period();
  if (!(t >= -slack && t <= seq.period() + slack)) {
    throw Error(ErrorCode::OutOfRange, "t outside the sequence period");
  }
  int k = static_cast<int>(std::floor(t / tp));
  k = std::clamp(k, 0, seq.size() - 1);
  const double local = std::clamp(t - k * tp, 0.0, tp);
  return pulse_rotation(seq.slot(k), seq.shape(), local) * seq.completed_rotation(k);
}

}  // namespace softdd

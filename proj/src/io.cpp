#include "cascade/io.hpp"

#include <string>

namespace cascade {

namespace {

Kind kind_from_string(const std::string& s) {
  if (s == "K") return Kind::K;
  if (s == "H") return Kind::H;
  if (s == "J") return Kind::J;
  throw std::invalid_argument("unknown frequency kind '" + s + "'");
}

}  // namespace

nlohmann::json field_to_json(const SpectralField& u) {
  nlohmann::json modes = nlohmann::json::array();
  for (int n = 0; n <= u.N; ++n) {
    for (int i = 0; i < 6; ++i) {
      const Complex c = u.amp(n, i);
      if (c == Complex(0.0, 0.0)) continue;
      const auto& e = u.table->entry(n, i);
      modes.push_back({{"shell", n},
                       {"kind", std::string(1, kind_char(e.kind))},
                       {"permutation", e.perm},
                       {"sign", 1},
                       {"re", c.real()},
                       {"im", c.imag()}});
    }
  }
  return {{"type", "modes"}, {"n_max", u.N}, {"modes", modes}};
}

SpectralField field_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("field document must be an object");
  const std::string type = j.value("type", "modes");
  if (type == "psi") {
    if (!j.contains("psi") || !j.at("psi").is_array())
      throw std::invalid_argument("psi-form field needs a 'psi' array");
    return from_psi(j.at("psi").get<std::vector<double>>());
  }
  if (type != "modes")
    throw std::invalid_argument("unknown field document type '" + type + "'");
  if (!j.contains("modes") || !j.at("modes").is_array())
    throw std::invalid_argument("mode-form field needs a 'modes' array");

  int n_max = j.value("n_max", -1);
  for (const auto& m : j.at("modes"))
    n_max = std::max(n_max, m.at("shell").get<int>());
  if (n_max < 0) throw std::invalid_argument("field document contains no shells");

  SpectralField out(n_max);
  std::vector<std::array<Complex, 6>> plus(out.amps.size()), minus(out.amps.size());
  std::vector<std::array<bool, 6>> has_plus(out.amps.size(), std::array<bool, 6>{}),
      has_minus(out.amps.size(), std::array<bool, 6>{});
  for (const auto& m : j.at("modes")) {
    const int n = m.at("shell").get<int>();
    const Kind kind = kind_from_string(m.at("kind").get<std::string>());
    if ((n % 2 == 0) != (kind == Kind::K))
      throw std::invalid_argument("kind does not match shell parity at shell " +
                                  std::to_string(n));
    const int perm = m.at("permutation").get<int>();
    if (perm < 0 || perm >= 6)
      throw std::invalid_argument("permutation id must lie in [0,6)");
    const int sign = m.value("sign", 1);
    if (sign != 1 && sign != -1)
      throw std::invalid_argument("sign must be +1 or -1");
    const Complex c(m.value("re", 0.0), m.value("im", 0.0));

    const Vec3 k = permute(kPerms[static_cast<size_t>(perm)],
                         canonical_frequency(kind, generation_of(n)));
    const int slot = out.table->find_slot(n, k);
    if (slot < 0) throw std::logic_error("mode resolution failed");
    auto& bucket = sign > 0 ? plus : minus;
    auto& flag = sign > 0 ? has_plus : has_minus;
    bucket[static_cast<size_t>(n)][static_cast<size_t>(slot)] += c;
    flag[static_cast<size_t>(n)][static_cast<size_t>(slot)] = true;
  }
  for (size_t n = 0; n < out.amps.size(); ++n) {
    for (size_t i = 0; i < 6; ++i) {
      if (has_plus[n][i] && has_minus[n][i])
        out.amps[n][i] = (plus[n][i] + std::conj(minus[n][i])) / 2.0;
      else if (has_plus[n][i])
        out.amps[n][i] = plus[n][i];
      else if (has_minus[n][i])
        out.amps[n][i] = std::conj(minus[n][i]);
    }
  }
  return out;
}

}  // namespace cascade

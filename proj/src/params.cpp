#include "artisim/params.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace artisim {

namespace {

struct Field {
  std::string_view key;
  double VehicleParams::*member;
};

// Order matches the written file.
constexpr std::array<Field, 20> kTabulated{{
    {"m1", &VehicleParams::m1},   {"m2", &VehicleParams::m2},
    {"J1", &VehicleParams::J1},   {"J2", &VehicleParams::J2},
    {"a1", &VehicleParams::a1},   {"b1", &VehicleParams::b1},
    {"L1", &VehicleParams::L1},   {"L1c", &VehicleParams::L1c},
    {"a2", &VehicleParams::a2},   {"b2", &VehicleParams::b2},
    {"L2", &VehicleParams::L2},   {"j", &VehicleParams::j},
    {"Fz2", &VehicleParams::Fz2}, {"Fz3", &VehicleParams::Fz3},
    {"Fz4", &VehicleParams::Fz4}, {"Fz5", &VehicleParams::Fz5},
    {"f", &VehicleParams::f},     {"i_s", &VehicleParams::i_s},
    {"q", &VehicleParams::q},     {"g", &VehicleParams::g},
}};

constexpr std::array<std::string_view, 5> kDerived{"Fz1", "L21", "L22", "L23", "Lc"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(LoadCondition c) {
  return c == LoadCondition::Unloaded ? "unloaded" : "loaded";
}

std::string_view to_string(ModelKind m) { return m == ModelKind::Kin ? "KIN" : "STM"; }

LoadCondition parse_load_condition(std::string_view s) {
  if (s == "unloaded" || s == "Unloaded") return LoadCondition::Unloaded;
  if (s == "loaded" || s == "Loaded") return LoadCondition::Loaded;
  throw ParamsError("unknown load condition '" + std::string(s) + "'");
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "kin" || s == "KIN") return ModelKind::Kin;
  if (s == "stm" || s == "STM") return ModelKind::Stm;
  throw ParamsError("unknown model '" + std::string(s) + "'");
}

void fill_derived(VehicleParams& p) {
  p.Fz1 = (p.m1 + p.m2) * p.g - (p.Fz2 + p.Fz3 + p.Fz4 + p.Fz5);
  p.L21 = p.L2 - p.j;
  p.L22 = p.L2;
  p.L23 = p.L2 + p.j;
  p.Lc = p.b1 - p.L1c;
}

VehicleParams builtin_params(LoadCondition condition, ModelKind model) {
  VehicleParams p;
  p.m1 = 8060.0;
  p.J1 = 11210.0;
  p.a1 = 1.09;
  p.b1 = 2.71;
  p.L1 = 3.8;
  p.L1c = 0.67;
  p.L2 = 7.5;
  p.j = 1.3;
  p.f = 6.0;
  p.q = 0.1;
  p.g = 9.81;
  p.i_s = model == ModelKind::Kin ? 20.5 : 21.5;

  if (condition == LoadCondition::Unloaded) {
    p.m2 = 7100.0;
    p.J2 = 34613.0;
    p.a2 = 5.96;
    p.b2 = 5.19;
    p.Fz2 = 34727.0;
    p.Fz3 = 17658.0;
    p.Fz4 = 18639.0;
    p.Fz5 = 18835.0;
  } else {
    p.m2 = 17360.0;
    p.J2 = 84630.0;
    p.a2 = 1.54;
    p.b2 = 2.31;
    p.Fz2 = 67100.0;
    p.Fz3 = 38651.0;
    p.Fz4 = 39632.0;
    p.Fz5 = 39436.0;
  }
  fill_derived(p);
  return p;
}

std::vector<std::string> validate_params(const VehicleParams& p) {
  std::vector<std::string> out;
  for (const auto& field : kTabulated) {
    const double v = p.*field.member;
    if (!std::isfinite(v)) out.push_back(std::string(field.key) + " is not finite");
  }
  const auto positive = [&](std::string_view name, double v) {
    if (!(v > 0.0)) out.push_back(std::string(name) + " > 0 violated (" + std::to_string(v) + ")");
  };
  positive("m1", p.m1);
  positive("m2", p.m2);
  positive("J1", p.J1);
  positive("J2", p.J2);
  positive("a1", p.a1);
  positive("b1", p.b1);
  positive("L1", p.L1);
  positive("L1c", p.L1c);
  positive("a2", p.a2);
  positive("b2", p.b2);
  positive("L2", p.L2);
  positive("j", p.j);
  positive("Fz1", p.Fz1);
  positive("Fz2", p.Fz2);
  positive("Fz3", p.Fz3);
  positive("Fz4", p.Fz4);
  positive("Fz5", p.Fz5);
  positive("f", p.f);
  positive("i_s", p.i_s);
  positive("g", p.g);

  if (!(p.q >= 0.0 && p.q < 1.0)) out.push_back("q in [0,1) violated (" + std::to_string(p.q) + ")");
  if (!(std::abs(p.a1 + p.b1 - p.L1) <= 1e-9)) out.push_back("a1 + b1 = L1 violated");
  if (!(p.L2 - p.L1c > 0.0)) out.push_back("L2 - L1c > 0 violated");
  if (!(p.L21 > 0.0)) out.push_back("L21 = L2 - j > 0 violated");

  const double weight = (p.m1 + p.m2) * p.g;
  const double loads = p.Fz1 + p.Fz2 + p.Fz3 + p.Fz4 + p.Fz5;
  if (!(weight > 0.0 && std::abs(loads / weight - 1.0) <= 0.005)) {
    out.push_back("axle loads balance (m1 + m2) g within 0.5% violated");
  }
  return out;
}

void write_params(std::ostream& os, const VehicleParams& p) {
  os << "# tractor-semitrailer parameters, SI units\n";
  char buf[32];
  for (const auto& field : kTabulated) {
    // Shortest text that parses back to the same double.
    const auto res = std::to_chars(buf, buf + sizeof(buf), p.*field.member);
    os << field.key << " = " << std::string_view(buf, res.ptr) << '\n';
  }
}

std::string serialize_params(const VehicleParams& p) {
  std::ostringstream os;
  write_params(os, p);
  return os.str();
}

VehicleParams parse_params(std::istream& is) {
  std::map<std::string, double, std::less<>> values;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParamsError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    const auto text = trim(view.substr(eq + 1));

    for (auto derived : kDerived) {
      if (key == derived) {
        throw ParamsError("line " + std::to_string(line_no) + ": '" + std::string(key) +
                          "' is derived and may not be set");
      }
    }
    bool known = false;
    for (const auto& field : kTabulated) known = known || field.key == key;
    if (!known) throw ParamsError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");

    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParamsError("line " + std::to_string(line_no) + ": cannot parse number '" + std::string(text) +
                        "' for key '" + std::string(key) + "'");
    }
    if (!values.emplace(std::string(key), v).second) {
      throw ParamsError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
  }

  VehicleParams p;
  for (const auto& field : kTabulated) {
    const auto it = values.find(field.key);
    if (it == values.end()) throw ParamsError("missing key '" + std::string(field.key) + "'");
    p.*field.member = it->second;
  }
  fill_derived(p);

  if (const auto violations = validate_params(p); !violations.empty()) {
    std::string msg = "invalid parameters:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ParamsError(msg);
  }
  return p;
}

VehicleParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParamsError("cannot open parameter file " + path.string());
  return parse_params(in);
}

}  // namespace artisim

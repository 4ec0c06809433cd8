#include "disclin/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string_view>
#include <system_error>
#include <vector>

#include "disclin/errors.hpp"
#include "disclin/version.hpp"

namespace disclin {

namespace {

double parse_double(std::string_view tok, const char* what) {
  double out = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw UsageError(std::string("malformed number for ") + what + ": '" +
                     std::string(tok) + "'");
  return out;
}

long parse_long(std::string_view tok, const char* what) {
  long out = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw UsageError(std::string("malformed integer for ") + what + ": '" +
                     std::string(tok) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, at - start));
    start = at + 1;
  }
}

void write_field_block(std::string& text, const Params& p, const PolarGrid& g,
                       const char* columns,
                       const std::function<void(std::string&, int, int)>& row_tail) {
  text += "# ";
  text += kFileStamp;
  text += " fields\n# model=";
  text += to_string(p.model);
  text += " h=" + format_g(p.h) + " delta=" + format_g(p.delta) +
          " n_r=" + std::to_string(g.n_r()) + " n_phi=" + std::to_string(g.n_phi()) +
          " r_min=" + format_g(g.r_min()) + "\n";
  text += columns;
  text += '\n';
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      text += format_g(g.r(k));
      text += ',';
      text += format_g(g.phi(j));
      row_tail(text, k, j);
      text += '\n';
    }
}

}  // namespace

std::string format_g(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string h_tag(double h) { return format_g(h); }

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open for writing: " + tmp.string());
    out << text;
    if (!out.flush()) throw UsageError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw UsageError("rename failed: " + path.string() + " (" + ec.message() + ")");
}

void write_fields_csv(const std::filesystem::path& path, const Params& p, const PolarGrid& g,
                      const FvkState& s) {
  check_shape(s.u, g, "write_fields_csv");
  check_shape(s.v, g, "write_fields_csv");
  std::string text;
  text.reserve(static_cast<std::size_t>(g.size()) * 64);
  write_field_block(text, p, g, "r,phi,u_x,u_y,v", [&](std::string& t, int k, int j) {
    t += ',';
    t += format_g(s.u.x(k, j));
    t += ',';
    t += format_g(s.u.y(k, j));
    t += ',';
    t += format_g(s.v.a(k, j));
  });
  atomic_write_text(path, text);
}

void write_fields_csv(const std::filesystem::path& path, const Params& p, const PolarGrid& g,
                      const Map3& y) {
  check_shape(y, g, "write_fields_csv");
  std::string text;
  text.reserve(static_cast<std::size_t>(g.size()) * 64);
  write_field_block(text, p, g, "r,phi,y1,y2,y3", [&](std::string& t, int k, int j) {
    for (const auto& comp : y.c) {
      t += ',';
      t += format_g(comp(k, j));
    }
  });
  atomic_write_text(path, text);
}

FieldsFile read_fields_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open fields file: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.rfind("# disclin", 0) != 0 ||
      line.find(" fields") == std::string::npos)
    throw UsageError("not a fields file: " + path.string());

  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw UsageError("missing metadata line in " + path.string());

  FieldsFile f;
  bool have_model = false;
  for (std::string_view tok : split(std::string_view(line).substr(2), ' ')) {
    if (tok.empty()) continue;
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("malformed metadata token '" + std::string(tok) + "'");
    const std::string_view key = tok.substr(0, eq);
    const std::string_view val = tok.substr(eq + 1);
    if (key == "model") {
      f.params.model = model_from_string(std::string(val));
      have_model = true;
    } else if (key == "h") {
      f.params.h = parse_double(val, "h");
    } else if (key == "delta") {
      f.params.delta = parse_double(val, "delta");
    } else if (key == "n_r") {
      f.n_r = static_cast<int>(parse_long(val, "n_r"));
    } else if (key == "n_phi") {
      f.n_phi = static_cast<int>(parse_long(val, "n_phi"));
    } else if (key == "r_min") {
      f.r_min = parse_double(val, "r_min");
    } else {
      throw UsageError("unknown metadata key '" + std::string(key) + "'");
    }
  }
  if (!have_model || f.n_r <= 0 || f.n_phi <= 0 || f.r_min <= 0.0)
    throw UsageError("incomplete metadata in " + path.string());
  f.params.validate();

  const char* expect_cols = f.params.model == Model::kFvk ? "r,phi,u_x,u_y,v" : "r,phi,y1,y2,y3";
  if (!std::getline(in, line) || line != expect_cols)
    throw UsageError("unexpected column header in " + path.string());

  const PolarGrid g = f.grid();
  if (f.params.model == Model::kFvk) {
    f.fvk.u = make_vector2(g);
    f.fvk.v = make_scalar(g);
  } else {
    f.plate = make_map3(g);
  }

  for (std::int64_t idx = 0; idx < g.size(); ++idx) {
    if (!std::getline(in, line))
      throw UsageError("truncated fields file: " + path.string());
    const auto toks = split(line, ',');
    if (toks.size() != 5) throw UsageError("expected 5 columns in " + path.string());
    const int k = static_cast<int>(idx / g.n_phi());
    const int j = static_cast<int>(idx % g.n_phi());
    if (f.params.model == Model::kFvk) {
      f.fvk.u.x(k, j) = parse_double(toks[2], "u_x");
      f.fvk.u.y(k, j) = parse_double(toks[3], "u_y");
      f.fvk.v.a(k, j) = parse_double(toks[4], "v");
    } else {
      for (int i = 0; i < 3; ++i)
        f.plate.c[static_cast<std::size_t>(i)](k, j) =
            parse_double(toks[static_cast<std::size_t>(2 + i)], "y");
    }
  }
  return f;
}

void write_kappa_csv(const std::filesystem::path& path, const Params& p,
                     const CurvatureProfile& prof) {
  std::string text;
  text += "# ";
  text += kFileStamp;
  text += " kappa\n# model=";
  text += to_string(p.model);
  text += " h=" + format_g(p.h) + " delta=" + format_g(p.delta) + "\n";
  text += "r,kappa,target,abs_dev\n";
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    text += format_g(prof.radii[i]);
    text += ',';
    text += format_g(prof.kappa[i]);
    text += ',';
    text += format_g(prof.target);
    text += ',';
    text += format_g(std::abs(prof.kappa[i] - prof.target));
    text += '\n';
  }
  atomic_write_text(path, text);
}

}  // namespace disclin

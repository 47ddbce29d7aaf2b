#include "levyflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "levyflow/errors.hpp"
#include "levyflow/spectral.hpp"

namespace levyflow {

namespace {

std::ofstream open_out(const std::string& path, std::ios_base::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void dump_rec(const OrderedJson& j, std::string& out, int indent, int depth) {
  const std::string pad(std::size_t(indent) * depth, ' ');
  const std::string pad_in(std::size_t(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case OrderedJson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in + OrderedJson(it.key()).dump() + ": ";
        dump_rec(it.value(), out, indent, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      return;
    }
    case OrderedJson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_rec(j[i], out, indent, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      return;
    }
    case OrderedJson::value_t::number_float:
      out += format_g17(j.get<double>());
      return;
    default:
      out += j.dump();  // strings (escaped), integers, booleans, null
      return;
  }
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string dump_json(const OrderedJson& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path, std::ios_base::out);
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

OrderedJson report_to_json(const InequalityReport& rep) {
  OrderedJson j;
  j["name"] = rep.name;
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["constant"] = rep.constant;
  j["slope"] = rep.slope;
  j["expected_slope"] = rep.expected_slope;
  j["tolerance"] = rep.tolerance;
  j["pass"] = rep.pass;
  j["description"] = rep.description;
  OrderedJson meta;
  for (const auto& [k, v] : rep.metadata) meta[k] = v;
  j["metadata"] = meta;
  return j;
}

void write_symbol_csv(const std::string& path, const SymbolTable& t) {
  auto out = open_out(path, std::ios_base::out);
  out << "k1,k2,xi,a\n";
  const TorusGrid& g = t.grid;
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    int k1, k2 = 0;
    if (g.dim == 1) {
      k1 = g.wavenumber(int(i));
    } else {
      k1 = g.wavenumber(int(i) / g.n);
      k2 = g.wavenumber(int(i) % g.n);
    }
    const double xi = std::sqrt(freq_norm2(g, i));
    out << k1 << ',' << k2 << ',' << format_g17(xi) << ',' << format_g17(t.a[i]) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_series_csv(const std::string& path, const std::vector<StepStats>& series) {
  auto out = open_out(path, std::ios_base::out);
  out << "t,l1,l2,linf,min,max\n";
  for (const auto& s : series)
    out << format_g17(s.t) << ',' << format_g17(s.l1) << ',' << format_g17(s.l2) << ','
        << format_g17(s.linf) << ',' << format_g17(s.min) << ',' << format_g17(s.max)
        << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_envelope_csv(const std::string& path, const std::vector<EnvelopeState>& states) {
  auto out = open_out(path, std::ios_base::out);
  out << "s,concentration,height,l1,conc_bound,height_bound,l1_bound,center_x,center_y,"
         "violated,saturated\n";
  for (const auto& e : states) {
    const bool violated = e.violated[0] || e.violated[1] || e.violated[2];
    out << format_g17(e.s) << ',' << format_g17(e.measured[0]) << ','
        << format_g17(e.measured[1]) << ',' << format_g17(e.measured[2]) << ','
        << format_g17(e.bounds[0]) << ',' << format_g17(e.bounds[1]) << ','
        << format_g17(e.bounds[2]) << ',' << format_g17(e.center[0]) << ','
        << format_g17(e.center[1]) << ',' << (violated ? 1 : 0) << ','
        << (e.saturated ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_field_csv(const std::string& path, const ScalarField& f) {
  auto out = open_out(path, std::ios_base::out);
  const TorusGrid& g = f.grid;
  if (g.dim == 1) {
    out << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto p = point_of(g, i);
      out << format_g17(p[0]) << ',' << format_g17(f.values[i]) << '\n';
    }
  } else {
    out << "x,y,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto p = point_of(g, i);
      out << format_g17(p[0]) << ',' << format_g17(p[1]) << ','
          << format_g17(f.values[i]) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_field_raw(const std::string& path, const ScalarField& f) {
  auto out = open_out(path, std::ios_base::out | std::ios_base::binary);
  out << "LVF1 " << f.grid.dim << ' ' << f.grid.n << ' ' << format_g17(f.grid.box)
      << '\n';
  out.write(reinterpret_cast<const char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace levyflow

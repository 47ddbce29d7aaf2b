#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "levyflow/field.hpp"
#include "levyflow/molecules.hpp"
#include "levyflow/solver.hpp"
#include "levyflow/symbol.hpp"
#include "levyflow/verify.hpp"

namespace levyflow {

// Insertion-ordered JSON document; serialized with 17-significant-digit
// floats so reruns are byte-comparable.
using OrderedJson = nlohmann::ordered_json;

// %.17g rendering used by every CSV and JSON number.
std::string format_g17(double v);

// Serializes with format_g17 for floating-point leaves.
std::string dump_json(const OrderedJson& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& content);

OrderedJson report_to_json(const InequalityReport& rep);

// CSV layouts (first line is the header):
//   symbol:    k1,k2,xi,a
//   series:    t,l1,l2,linf,min,max
//   envelope:  s,concentration,height,l1,conc_bound,height_bound,l1_bound,
//              center_x,center_y,violated,saturated
//   field:     x,y,value   (x,value for dim 1)
void write_symbol_csv(const std::string& path, const SymbolTable& t);
void write_series_csv(const std::string& path, const std::vector<StepStats>& series);
void write_envelope_csv(const std::string& path, const std::vector<EnvelopeState>& states);
void write_field_csv(const std::string& path, const ScalarField& f);

// Raw snapshot: ASCII header line "LVF1 dim n box\n" followed by the values
// as native little-endian float64.
void write_field_raw(const std::string& path, const ScalarField& f);

}  // namespace levyflow

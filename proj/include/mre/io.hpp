#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mre/fields.hpp"

namespace mre::io {

/// Legacy-VTK structured-points writers/readers, one field per file,
/// values printed with 17 significant digits.
void write_vtk(const std::string& path, const std::string& name, const ScalarField& f);
void write_vtk(const std::string& path, const std::string& name, const VectorField& f);

using FieldVariant = std::variant<ScalarField, VectorField>;
FieldVariant read_vtk(const std::string& path);
ScalarField read_vtk_scalar(const std::string& path);
VectorField read_vtk_vector(const std::string& path);

/// Flat CSV: node index, coordinates, then one column per component.
void write_csv(const std::string& path, const ScalarField& f);
void write_csv(const std::string& path, const VectorField& f);

/// Generic table CSV for traces and ratio tables.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Human-readable key=value config; '#' starts a comment. Consumers declare
/// the allowed key set; unknown keys are rejected.
class Config {
  public:
    static Config load(const std::string& path);
    static Config from_string(const std::string& text);

    void restrict_keys(const std::set<std::string>& allowed) const;
    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace mre::io

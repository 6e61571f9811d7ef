#pragma once

// Legacy ASCII VTK unstructured-grid snapshots. Cell data: surface id and
// dislocation density; point data: node class. Import rebuilds adjacency,
// reconstructs the domain polygon from the hull and reclassifies nodes.

#include <string>
#include <vector>

#include "trm/mesh.hpp"

namespace trm {

struct VtkMeta {
    double time = 0.0;
    long step = 0;
};

// Mesh must be compact (no dead nodes/elements); rho_by_surf is indexed by
// surface id and may be empty (zeros are written).
void write_vtk(const std::string& path, const Mesh& m,
               const std::vector<double>& rho_by_surf, const VtkMeta& meta);

Mesh read_vtk(const std::string& path, VtkMeta* meta = nullptr,
              std::vector<double>* rho_by_surf = nullptr);

} // namespace trm

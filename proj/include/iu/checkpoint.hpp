#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iu/errors.hpp"
#include "iu/nn_core.hpp"

namespace iu::ckpt {

// Versioned flat container of named entries: f64 matrices (raw little-endian
// payload, so save->load is bit-exact) and byte blobs for text metadata.
class Container {
public:
    void put_matrix(const std::string& name, const Eigen::MatrixXd& m);
    void put_scalar(const std::string& name, double v);
    void put_bytes(const std::string& name, const std::string& bytes);

    bool has(const std::string& name) const;
    const Eigen::MatrixXd& get_matrix(const std::string& name) const;
    double get_scalar(const std::string& name) const;
    const std::string& get_bytes(const std::string& name) const;

    std::vector<std::string> names() const;

    void save(const std::string& path) const;
    static Container load(const std::string& path);

private:
    struct Entry {
        std::uint8_t kind = 0;  // 0 = f64 matrix, 1 = bytes
        Eigen::MatrixXd mat;
        std::string bytes;
    };
    std::vector<std::string> order_;
    std::map<std::string, Entry> entries_;

    const Entry& get(const std::string& name, std::uint8_t kind) const;
    Entry& insert(const std::string& name, std::uint8_t kind);
};

// ParamStore adapters. Layer l is stored as <prefix>.l.W / <prefix>.l.b plus
// Adam state (<prefix>.l.mW ...) and the step counter <prefix>.t.
void put_params(Container& c, const std::string& prefix, const nn::ParamStore& p);
nn::ParamStore get_params(const Container& c, const std::string& prefix,
                          const std::vector<nn::LayerSpec>& spec);

}  // namespace iu::ckpt

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sptc/error.hpp"

namespace sptc {

/// Dense row-major float tensor.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape_);

    std::size_t size() const { return data.size(); }
    static std::size_t element_count(const std::vector<std::size_t>& shape);
};

/// Named map of tensors; the unit of checkpointing, statistics and
/// initialization. Iteration order is lexicographic by name.
class ParamSet {
public:
    using Map = std::map<std::string, Tensor>;

    void insert(const std::string& name, Tensor t);
    bool contains(const std::string& name) const { return tensors_.count(name) > 0; }
    const Tensor& at(const std::string& name) const;
    Tensor& at(const std::string& name);

    std::size_t tensor_count() const { return tensors_.size(); }
    std::size_t total_entries() const;
    std::vector<std::string> names() const;

    Map::const_iterator begin() const { return tensors_.begin(); }
    Map::const_iterator end() const { return tensors_.end(); }
    Map::iterator begin() { return tensors_.begin(); }
    Map::iterator end() { return tensors_.end(); }

private:
    Map tensors_;
};

}  // namespace sptc

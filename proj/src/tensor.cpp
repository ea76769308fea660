#include "sptc/tensor.hpp"

namespace sptc {

std::size_t Tensor::element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

Tensor::Tensor(std::vector<std::size_t> shape_) : shape(std::move(shape_)) {
    data.assign(element_count(shape), 0.0f);
}

void ParamSet::insert(const std::string& name, Tensor t) {
    if (t.data.size() != Tensor::element_count(t.shape)) {
        throw DataError("tensor " + name + " has inconsistent shape/data");
    }
    tensors_[name] = std::move(t);
}

const Tensor& ParamSet::at(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw DataError("missing tensor: " + name);
    return it->second;
}

Tensor& ParamSet::at(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw DataError("missing tensor: " + name);
    return it->second;
}

std::size_t ParamSet::total_entries() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_) n += t.size();
    return n;
}

std::vector<std::string> ParamSet::names() const {
    std::vector<std::string> out;
    out.reserve(tensors_.size());
    for (const auto& [name, t] : tensors_) out.push_back(name);
    return out;
}

}  // namespace sptc

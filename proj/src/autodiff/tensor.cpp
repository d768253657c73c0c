// Copyright 2026 The GridCast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gridcast/autodiff/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace gridcast::ad
{

namespace
{

#ifdef NDEBUG
std::atomic<bool> g_check_finite{false};
#else
std::atomic<bool> g_check_finite{true};
#endif

}  // namespace

void set_check_finite(bool enabled) { g_check_finite.store(enabled); }
bool check_finite_enabled() { return g_check_finite.load(); }

std::size_t shape_numel(const Shape & shape)
{
  std::size_t n = 1;
  for (int d : shape) {
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const Shape & shape)
{
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += (i ? ", " : "") + std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(std::move(shape))
{
  if (shape_.empty() || static_cast<int>(shape_.size()) > kMaxRank) {
    throw std::invalid_argument("tensor rank must be in [1, 5], got shape " + shape_string(shape_));
  }
  for (int d : shape_) {
    if (d < 1) {
      throw std::invalid_argument("tensor dims must be positive, got shape " + shape_string(shape_));
    }
  }
  data_.assign(shape_numel(shape_), fill);
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values) : Tensor(std::move(shape))
{
  if (values.size() != data_.size()) {
    throw std::invalid_argument("tensor of shape " + shape_string(shape_) + " needs " +
                                std::to_string(data_.size()) + " values, got " + std::to_string(values.size()));
  }
  data_ = std::move(values);
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(Shape shape) const
{
  if (shape_numel(shape) != data_.size()) {
    throw std::invalid_argument("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

template <typename T>
void Tensor<T>::fill(T v)
{
  std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
bool Tensor<T>::all_finite() const
{
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
Tensor<T> & Node<T>::grad_buffer()
{
  if (grad.empty()) {
    grad = Tensor<T>(value.shape());
  }
  return grad;
}

template <typename T>
Var<T>::Var(Tensor<T> value, bool requires_grad) : node_(std::make_shared<Node<T>>())
{
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

template <typename T>
void backward(const Var<T> & loss)
{
  if (!loss.defined() || loss.value().numel() != 1) {
    throw std::invalid_argument("backward needs a single-element loss");
  }
  if (!loss.requires_grad()) {
    return;
  }
  // iterative post-order DFS
  std::vector<Node<T> *> order;
  std::unordered_set<Node<T> *> visited;
  std::vector<std::pair<Node<T> *, std::size_t>> stack{{loss.node().get(), 0}};
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto & [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T> * p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) {
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.node()->grad_buffer()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn && !(*it)->grad.empty()) {
      (*it)->backward_fn();
    }
  }
}

template class Tensor<float>;
template class Tensor<double>;
template struct Node<float>;
template struct Node<double>;
template class Var<float>;
template class Var<double>;
template void backward<float>(const Var<float> &);
template void backward<double>(const Var<double> &);

}  // namespace gridcast::ad

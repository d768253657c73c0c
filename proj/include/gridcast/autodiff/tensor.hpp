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

// Dense tensors and a tape-free reverse-mode graph.
//
// A Var owns a Node holding the forward value, a lazily allocated gradient and
// the closure that pushes the node's gradient into its parents. The graph is
// the set of nodes reachable from the loss; backward() sorts it topologically
// and runs the closures in reverse order.

#ifndef GRIDCAST__AUTODIFF__TENSOR_HPP_
#define GRIDCAST__AUTODIFF__TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace gridcast::ad
{

inline constexpr int kMaxRank = 5;

using Shape = std::vector<int>;

std::size_t shape_numel(const Shape & shape);
std::string shape_string(const Shape & shape);

template <typename T>
class Tensor
{
public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> values);

  const Shape & shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T * data() { return data_.data(); }
  const T * data() const { return data_.data(); }
  std::vector<T> & values() { return data_; }
  const std::vector<T> & values() const { return data_; }
  T & operator[](std::size_t i) { return data_[i]; }
  const T & operator[](std::size_t i) const { return data_[i]; }

  /// Same data, new shape with equal element count.
  Tensor reshaped(Shape shape) const;
  void fill(T v);
  bool all_finite() const;

  template <typename U>
  Tensor<U> cast() const
  {
    return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename T>
struct Node
{
  Tensor<T> value;
  Tensor<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backward_fn;

  /// Gradient buffer, zero-initialised on first use.
  Tensor<T> & grad_buffer();
};

template <typename T>
class Var
{
public:
  Var() = default;
  explicit Var(Tensor<T> value, bool requires_grad = false);

  const Tensor<T> & value() const { return node_->value; }
  const Shape & shape() const { return node_->value.shape(); }
  /// Empty until backward() reaches this node.
  const Tensor<T> & grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return static_cast<bool>(node_); }

  const std::shared_ptr<Node<T>> & node() const { return node_; }
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

private:
  std::shared_ptr<Node<T>> node_;
};

/// Seeds d(loss)/d(loss) = 1 for a single-element loss and accumulates
/// gradients into every reachable node with requires_grad.
template <typename T>
void backward(const Var<T> & loss);

/// When enabled every op throws std::runtime_error on a non-finite output.
/// Defaults to on in builds without NDEBUG.
void set_check_finite(bool enabled);
bool check_finite_enabled();

}  // namespace gridcast::ad

#endif  // GRIDCAST__AUTODIFF__TENSOR_HPP_

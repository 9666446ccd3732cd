#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "mpjacobi/errors.hpp"
#include "mpjacobi/multiprec.hpp"

namespace mpj {

/// Dense column-major matrix.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0.0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1.0);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[j * rows_ + i];
    }
    const T& operator()(std::size_t i, std::size_t j) const noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[j * rows_ + i];
    }

    std::span<T> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
    std::span<const T> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    Matrix transposed() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i)
                t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Square matrix with a[i][j] == a[j][i] exactly. Writes go through set(),
/// which mirrors; the lower triangle is authoritative when building from a
/// general matrix.
template <class T>
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : m_(n, n) {}

    static SymMatrix identity(std::size_t n)
    {
        SymMatrix s;
        s.m_ = Matrix<T>::identity(n);
        return s;
    }

    /// Copies the lower triangle into the upper one.
    static SymMatrix from_lower(Matrix<T> m)
    {
        if (m.rows() != m.cols())
            throw DomainError("symmetric matrix must be square");
        const std::size_t n = m.rows();
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j + 1; i < n; ++i)
                m(j, i) = m(i, j);
        SymMatrix s;
        s.m_ = std::move(m);
        return s;
    }

    /// Throws DomainError unless m is square and exactly symmetric.
    static SymMatrix from_full(Matrix<T> m)
    {
        if (m.rows() != m.cols())
            throw DomainError("symmetric matrix must be square");
        const std::size_t n = m.rows();
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j + 1; i < n; ++i)
                if (!(m(i, j) == m(j, i)))
                    throw DomainError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");
        SymMatrix s;
        s.m_ = std::move(m);
        return s;
    }

    std::size_t n() const noexcept { return m_.rows(); }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    void set(std::size_t i, std::size_t j, const T& v) noexcept
    {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    const Matrix<T>& full() const noexcept { return m_; }
    std::span<const T> col(std::size_t j) const noexcept { return m_.col(j); }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.m_ == b.m_; }

private:
    Matrix<T> m_;
};

/// Entrywise conversion between scalar types.
template <class To, class From>
Matrix<To> convert(const Matrix<From>& m)
{
    Matrix<To> r(m.rows(), m.cols());
    auto src = m.values();
    auto dst = r.values();
    for (std::size_t k = 0; k < src.size(); ++k)
        dst[k] = scalar_traits<To>::from_double(scalar_traits<From>::to_double(src[k]));
    return r;
}

template <class To, class From>
SymMatrix<To> convert(const SymMatrix<From>& m)
{
    return SymMatrix<To>::from_lower(convert<To>(m.full()));
}

template <>
inline Matrix<DDNumber> convert<DDNumber, double>(const Matrix<double>& m)
{
    Matrix<DDNumber> r(m.rows(), m.cols());
    std::copy(m.values().begin(), m.values().end(), r.values().begin());
    return r;
}

/// Lossless widening from binary32-valued storage.
template <>
inline Matrix<double> convert<double, LowFloat>(const Matrix<LowFloat>& m)
{
    Matrix<double> r(m.rows(), m.cols());
    auto src = m.values();
    auto dst = r.values();
    for (std::size_t k = 0; k < src.size(); ++k)
        dst[k] = src[k].value();
    return r;
}

} // namespace mpj

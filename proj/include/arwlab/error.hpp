#ifndef ARWLAB_ERROR_HPP
#define ARWLAB_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arwlab {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class fixture_out_of_window : public error {
public:
    fixture_out_of_window(long site, long index)
        : error("fixture index out of window: site " + std::to_string(site) + ", index " +
                std::to_string(index)),
          m_site(site), m_index(index) {}
    long site() const { return m_site; }
    long index() const { return m_index; }

private:
    long m_site;
    long m_index;
};

class budget_exceeded : public error {
public:
    explicit budget_exceeded(std::uint64_t partial_tau)
        : error("instruction budget exceeded after " + std::to_string(partial_tau) + " instructions"),
          m_tau(partial_tau) {}
    std::uint64_t partial_tau() const { return m_tau; }

private:
    std::uint64_t m_tau;
};

class memory_budget_exceeded : public error {
public:
    explicit memory_budget_exceeded(std::uint64_t cells)
        : error("cell budget exceeded at " + std::to_string(cells) + " cells"), m_cells(cells) {}
    std::uint64_t cells() const { return m_cells; }

private:
    std::uint64_t m_cells;
};

class enumeration_budget_exceeded : public error {
public:
    using error::error;
};

class reverse_path_blocked : public error {
public:
    using error::error;
};

class not_in_class : public error {
public:
    using error::error;
};

class not_a_path : public error {
public:
    using error::error;
};

class not_an_infection : public error {
public:
    using error::error;
};

class config_invalid : public error {
public:
    using error::error;
};

} // namespace arwlab

#endif

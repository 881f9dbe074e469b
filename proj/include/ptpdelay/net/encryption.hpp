#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace ptpdelay::net
{

/// Length-only model of a tunnel's encryption envelope.
///
/// A block rule computes `header + round_up(plain + trailer, block)`.
/// A table maps exact plain lengths and may fall back to a rule for anything
/// not listed.
struct BlockRule
{
    std::uint32_t header = 0;
    std::uint32_t trailer = 0;
    std::uint32_t block = 1;

    [[nodiscard]] std::uint32_t wrap(std::uint32_t plain) const;
};

class EncryptionScheme
{
public:
    static EncryptionScheme identity();
    // Reproduces the observed IPsec tunnel lengths: 86 -> 138, 96 -> 138, 106 -> 154.
    static EncryptionScheme ipsec_tunnel();
    static EncryptionScheme from_rule(std::string name, BlockRule rule);
    static EncryptionScheme from_table(std::string name, std::map<std::uint32_t, std::uint32_t> table,
                                       std::optional<BlockRule> fallback = std::nullopt);
    // "identity" or "ipsec-tunnel".
    static EncryptionScheme by_name(const std::string& name);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::uint32_t encrypt_wrap(std::uint32_t plain_length) const;

private:
    std::string name_;
    std::map<std::uint32_t, std::uint32_t> table_;
    std::optional<BlockRule> rule_;
};

[[nodiscard]] inline std::uint32_t encrypt_wrap(std::uint32_t plain_length, const EncryptionScheme& scheme)
{
    return scheme.encrypt_wrap(plain_length);
}

} // namespace ptpdelay::net

#include "ptpdelay/net/encryption.hpp"

#include "ptpdelay/error.hpp"

namespace ptpdelay::net
{

std::uint32_t BlockRule::wrap(std::uint32_t plain) const
{
    const std::uint32_t b = block == 0 ? 1 : block;
    const std::uint32_t body = plain + trailer;
    return header + (body + b - 1) / b * b;
}

EncryptionScheme EncryptionScheme::identity()
{
    return from_rule("identity", BlockRule{0, 0, 1});
}

EncryptionScheme EncryptionScheme::ipsec_tunnel()
{
    // The rule alone reproduces the table; listing the PTP lengths keeps the
    // observed values pinned even if the fallback is retuned.
    return from_table("ipsec-tunnel", {{86, 138}, {96, 138}, {106, 154}}, BlockRule{26, 14, 16});
}

EncryptionScheme EncryptionScheme::from_rule(std::string name, BlockRule rule)
{
    EncryptionScheme s;
    s.name_ = std::move(name);
    s.rule_ = rule;
    return s;
}

EncryptionScheme EncryptionScheme::from_table(std::string name, std::map<std::uint32_t, std::uint32_t> table,
                                              std::optional<BlockRule> fallback)
{
    EncryptionScheme s;
    s.name_ = std::move(name);
    s.table_ = std::move(table);
    s.rule_ = fallback;
    for (const auto& [plain, wire] : s.table_)
    {
        if (wire < plain)
        {
            throw ConfigError("encryption table maps " + std::to_string(plain) + " B to shorter " +
                              std::to_string(wire) + " B");
        }
    }
    return s;
}

EncryptionScheme EncryptionScheme::by_name(const std::string& name)
{
    if (name == "identity")
    {
        return identity();
    }
    if (name == "ipsec-tunnel")
    {
        return ipsec_tunnel();
    }
    throw ConfigError("unknown encryption scheme '" + name + "' (expected identity | ipsec-tunnel)");
}

std::uint32_t EncryptionScheme::encrypt_wrap(std::uint32_t plain_length) const
{
    if (plain_length == 0)
    {
        throw ConfigError("plain length must be positive");
    }
    if (const auto it = table_.find(plain_length); it != table_.end())
    {
        return it->second;
    }
    if (rule_)
    {
        return rule_->wrap(plain_length);
    }
    throw ConfigError("scheme '" + name_ + "' has no mapping for " + std::to_string(plain_length) + " B");
}

} // namespace ptpdelay::net

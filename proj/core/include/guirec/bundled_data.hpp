#pragma once

#include <string_view>

namespace guirec::bundled {

// The "mini-hub" GUI model: eight pages of a code-hosting site (sign-in with
// a cookie/login/password gate, password reset, sign-up, dashboard,
// repository, issue list, issue form, profile settings).
std::string_view mini_hub_model();

// Fifty recorded-style user scripts over the mini-hub model.
std::string_view mini_hub_scripts();

}  // namespace guirec::bundled

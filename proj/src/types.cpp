#include "mwjoin/types.hpp"

namespace mwjoin {

char role_letter(Role r) {
  switch (r) {
    case Role::A: return 'A';
    case Role::B: return 'B';
    case Role::C: return 'C';
    case Role::D: return 'D';
  }
  throw std::invalid_argument("unknown role");
}

Role parse_role(char c) {
  switch (c) {
    case 'A': case 'a': return Role::A;
    case 'B': case 'b': return Role::B;
    case 'C': case 'c': return Role::C;
    case 'D': case 'd': return Role::D;
    default:
      throw std::invalid_argument(std::string("unknown column role: ") + c);
  }
}

int Relation::role_index(Role r) const {
  if (roles[0] == r) return 0;
  if (roles[1] == r) return 1;
  throw std::invalid_argument(std::string("relation ") + name +
                              " has no column " + role_letter(r));
}

} // namespace mwjoin

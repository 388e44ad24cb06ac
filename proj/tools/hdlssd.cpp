#include <iostream>

#include "hdlss/hdlss.hpp"

int main() {
    std::cout << "hdlssd\n";
    return 0;
}

int main() { unsigned int x = 1u; unsigned int y = 2u;
 // P(x,y) {x <= 0x10, y < 10u, 3x <= 2y}
 }

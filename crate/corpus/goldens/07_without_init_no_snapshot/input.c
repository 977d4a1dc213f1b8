int main() { int x = 3;
 // P(x) {x==3}
 assert(x == 3); }

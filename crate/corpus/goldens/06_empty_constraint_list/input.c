int main() { int x = 0;
 // P(x) {}
 assert(x == 0); }

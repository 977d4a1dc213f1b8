int main() { int x = 0;

 assert(x == 0); }

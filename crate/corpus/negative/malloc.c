int main() { int x = malloc(4); }
